from typing import Optional

import numpy as np

from ..errors import ConfigurationError
from ..models.environment import RateMap
from .base import CsvRepository


class RateMapRepository(CsvRepository):
    columns = ("state_index", "rate")

    def save(self, rate_map: RateMap, path: str, meta: Optional[dict] = None) -> str:
        rows = ({"state_index": s, "rate": repr(float(r))} for s, r in enumerate(rate_map.rates))
        return self.write_rows(rows, path, meta)

    def load(self, path: str) -> RateMap:
        """
        Raises:
            ConfigurationError: the file is missing, unordered or holds a bad rate.
        """
        try:
            rows = self.read_rows(path)
        except OSError as err:
            raise ConfigurationError(f"cannot read rate map {path}: {err}", field="rate_map_csv") from err
        try:
            indices = [int(row["state_index"]) for row in rows]
            rates = [float(row["rate"]) for row in rows]
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigurationError(f"malformed rate map {path}: {err}", field="rate_map_csv") from err
        if indices != list(range(len(indices))):
            raise ConfigurationError("state_index must run 0..S-1 in order", field="rate_map_csv")
        return RateMap(np.asarray(rates))
