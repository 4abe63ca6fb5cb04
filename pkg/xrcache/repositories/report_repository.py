from typing import Iterable, List, Optional

from ..models.beams import BeamformerSolution
from ..models.reports import AggregateResult, DeliveryReport
from .base import CsvRepository

DROP_COLUMNS = ("scheme", "seed", "K", "S", "L", "alpha", "M", "sigma", "border_snr", "T_T", "censored")
AGGREGATE_COLUMNS = ("parameter", "value", "scheme", "drops", "mean_T_T", "p95_T_T", "iqr_T_T", "censored")
CDF_COLUMNS = ("parameter", "value", "scheme", "T_T", "cdf")
TRACE_COLUMNS = ("transmission", "iteration", "objective", "power")


class ReportRepository(CsvRepository):
    """Per-drop, aggregate, CDF and beam-trace CSVs."""

    columns = DROP_COLUMNS

    def save(self, reports: Iterable[DeliveryReport], path: str, meta: Optional[dict] = None) -> str:
        return self.write_rows((report.to_row() for report in reports), path, meta)

    def load(self, path: str) -> List[dict]:
        return self.read_rows(path)

    def save_aggregate(self, result: AggregateResult, path: str, meta: Optional[dict] = None) -> str:
        return self.write_rows(result.rows(), path, meta, columns=AGGREGATE_COLUMNS)

    def save_cdf(self, result: AggregateResult, path: str, meta: Optional[dict] = None) -> str:
        return self.write_rows(result.cdf_rows(), path, meta, columns=CDF_COLUMNS)

    def save_trace(self, solutions: Iterable[BeamformerSolution], path: str, meta: Optional[dict] = None) -> str:
        rows = (
            {"transmission": index, "iteration": iteration, "objective": objective, "power": power}
            for index, solution in enumerate(solutions)
            if solution is not None
            for iteration, (objective, power) in enumerate(zip(solution.trace, solution.power_trace))
        )
        return self.write_rows(rows, path, meta, columns=TRACE_COLUMNS)
