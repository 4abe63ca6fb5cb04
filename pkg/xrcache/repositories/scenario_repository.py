import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Optional

import yaml
from pydantic import ValidationError

from ..errors import ConfigurationError
from ..models.scenario import Scenario
from .base import BaseRepository

logger = logging.getLogger(__name__)


def _first_error(err: ValidationError) -> str:
    issue = err.errors()[0]
    location = ".".join(str(part) for part in issue.get("loc", ()))
    message = issue.get("msg", "invalid value")
    return f"{location}: {message}" if location else message


class ScenarioRepository(BaseRepository):
    """Scenario files in YAML (.yaml/.yml) or TOML (.toml)."""

    def load(self, path: str) -> Scenario:
        """
        Raises:
            ConfigurationError: unreadable file, unknown format, unknown key or invalid value.
        """
        extension = os.path.splitext(path)[1].lower()
        try:
            if extension in (".yaml", ".yml"):
                with open(path, encoding="utf-8") as handle:
                    data = yaml.safe_load(handle) or {}
            elif extension == ".toml":
                with open(path, "rb") as handle:
                    data = tomllib.load(handle)
            else:
                raise ConfigurationError(f"unsupported config format {extension!r}", field="config")
        except OSError as err:
            raise ConfigurationError(f"cannot read {path}: {err}", field="config") from err
        except (yaml.YAMLError, tomllib.TOMLDecodeError) as err:
            raise ConfigurationError(f"cannot parse {path}: {err}", field="config") from err
        if not isinstance(data, dict):
            raise ConfigurationError("top level must be a mapping of sections", field="config")
        return self.parse(data)

    @staticmethod
    def parse(data: dict) -> Scenario:
        try:
            scenario = Scenario.model_validate(data)
        except ValidationError as err:
            raise ConfigurationError(_first_error(err)) from err
        logger.debug("Loaded scenario %s", scenario.fingerprint())
        return scenario

    def save(self, scenario: Scenario, path: str, meta: Optional[dict] = None) -> str:
        with open(self._prepare(path), "w", encoding="utf-8") as handle:
            yaml.safe_dump(scenario.model_dump(mode="json", exclude_none=True), handle, sort_keys=True)
        return path
