import csv
import json
import os
from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List, Optional, Sequence

from ..config import Config

HEADER_PREFIX = "# xrcache"


def provenance_header(meta: Optional[Dict[str, Any]] = None) -> str:
    """``# xrcache <version> config=<canonical JSON>``"""
    body = json.dumps(meta or {}, sort_keys=True, separators=(",", ":"))
    return f"{HEADER_PREFIX} {Config.VERSION} config={body}"


def parse_header(line: str) -> Dict[str, Any]:
    if not line.startswith(HEADER_PREFIX):
        return {}
    _, _, body = line.partition("config=")
    try:
        return json.loads(body)
    except ValueError:
        return {}


class BaseRepository(ABC):
    """File-backed store for one artifact type."""

    @abstractmethod
    def save(self, obj, path: str, meta: Optional[Dict[str, Any]] = None) -> str:
        raise NotImplementedError

    @abstractmethod
    def load(self, path: str):
        raise NotImplementedError

    @staticmethod
    def _prepare(path: str) -> str:
        folder = os.path.dirname(os.path.abspath(path))
        os.makedirs(folder, exist_ok=True)
        return path


class CsvRepository(BaseRepository):
    """Rows with fixed columns below a provenance header line."""

    columns: Sequence[str] = ()

    def write_rows(self, rows: Iterable[Dict[str, Any]], path: str, meta=None,
                   columns: Optional[Sequence[str]] = None) -> str:
        columns = list(columns or self.columns)
        with open(self._prepare(path), "w", newline="", encoding="utf-8") as handle:
            handle.write(provenance_header(meta) + "\n")
            writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        return path

    def read_rows(self, path: str) -> List[Dict[str, str]]:
        with open(path, newline="", encoding="utf-8") as handle:
            lines = [line for line in handle if not line.startswith("#")]
        return list(csv.DictReader(lines))

    def read_meta(self, path: str) -> Dict[str, Any]:
        with open(path, encoding="utf-8") as handle:
            return parse_header(handle.readline().rstrip("\n"))


class JsonRepository(BaseRepository):
    """JSON documents with the provenance under ``meta``."""

    def write_document(self, body: Dict[str, Any], path: str, meta=None) -> str:
        document = {"meta": {"tool": "xrcache", "version": Config.VERSION, "config": meta or {}}}
        document.update(body)
        with open(self._prepare(path), "w", encoding="utf-8") as handle:
            json.dump(document, handle, indent=2, sort_keys=True)
            handle.write("\n")
        return path

    def read_document(self, path: str) -> Dict[str, Any]:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
