from .allocation import AllocationProblem, MemoryAllocation, TradeoffMode
from .beams import BeamformerSolution, BeamformingOptions, BeamProblem
from .environment import ChannelRealization, EnvironmentConfig, RateMap, State, StateGrid
from .plan import Codeword, CompletenessReport, DeliveryMode, SegmentId, Transmission, TransmissionPlan, UserDemand
from .reports import AggregateResult, ApproxReport, DeliveryReport, SchemeSummary
from .scenario import MAIN_SCHEMES, PRESETS, SCHEMES, Scenario, SchemeSpec, SweepSpec
