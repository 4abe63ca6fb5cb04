from .allocation_repository import AllocationRepository
from .beam_repository import BeamRepository
from .layout_repository import LayoutRepository
from .plan_repository import PlanRepository, StoredPlan
from .rate_map_repository import RateMapRepository
from .report_repository import ReportRepository
from .scenario_repository import ScenarioRepository

__all__ = [
    "AllocationRepository",
    "BeamRepository",
    "LayoutRepository",
    "PlanRepository",
    "RateMapRepository",
    "ReportRepository",
    "ScenarioRepository",
    "StoredPlan",
]
