import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

import click
from rich.console import Console

from ..models.scenario import PRESETS, Scenario
from ..repositories import ScenarioRepository

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """Options shared by every subcommand."""

    config_path: Optional[str] = None
    output_dir: str = "results"
    seed: Optional[int] = None
    threads: Optional[int] = None
    console: Console = field(default_factory=Console)
    _scenario: Optional[Scenario] = None

    def scenario(self, preset: Optional[str] = None) -> Scenario:
        """Scenario from --config (or a preset), with --seed applied to every seed."""
        if self._scenario is not None and preset is None:
            return self._scenario
        if preset is not None and self.config_path is None:
            scenario = PRESETS[preset]()
        elif self.config_path is not None:
            scenario = ScenarioRepository().load(self.config_path)
        else:
            raise click.UsageError("this command needs --config (or --preset)")
        if self.seed is not None:
            scenario = scenario.updated("environment", rng_seed=self.seed).updated("experiment",
                                                                                   master_seed=self.seed)
        self._scenario = scenario
        return scenario

    def meta(self, scenario: Optional[Scenario] = None, **extra) -> dict:
        """Provenance: the full resolved scenario plus command details."""
        meta = {"scenario": json.loads(scenario.canonical_json()) if scenario is not None else None}
        meta.update(extra)
        return meta

    def output(self, name: str) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        return os.path.join(self.output_dir, name)


pass_run = click.make_pass_decorator(RunContext)
