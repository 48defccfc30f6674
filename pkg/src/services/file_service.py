import hashlib
import json
from pathlib import Path
from typing import Dict, List, Optional, Any
import logging

import numpy as np
import pandas as pd

from ..config import Config
from .errors import DataError

logger = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


class FileService:

    def __init__(self):
        self.supported_formats = Config.SUPPORTED_METADATA_FORMATS

    def read_text(self, path: str) -> str:
        file_path = Path(path)
        if not file_path.exists():
            raise DataError(f"Input file not found: {path}")
        try:
            return file_path.read_text(encoding='utf-8')
        except UnicodeDecodeError:
            return file_path.read_text(encoding='latin-1')
        except OSError as e:
            raise DataError(f"Could not read {path}: {e}")

    def read_table(self, path: str) -> pd.DataFrame:
        """Read a CSV or Excel table with a header row"""
        file_path = Path(path)
        if not file_path.exists():
            raise DataError(f"Input file not found: {path}")
        if file_path.suffix.lower() not in self.supported_formats:
            raise DataError(f"Unsupported table format: {file_path.name}")

        if file_path.suffix.lower() == '.csv':
            df = self._read_csv(file_path)
        else:
            df = self._read_excel(file_path)
        if df is None or df.empty:
            raise DataError(f"Table {file_path.name} is empty or unreadable")
        return df

    def _read_csv(self, file_path: Path) -> Optional[pd.DataFrame]:
        for encoding in ['utf-8', 'latin-1', 'cp1252']:
            try:
                return pd.read_csv(file_path, encoding=encoding, skipinitialspace=True)
            except UnicodeDecodeError:
                continue
            except pd.errors.ParserError as e:
                raise DataError(f"Malformed CSV {file_path.name}: {e}")
        return None

    def _read_excel(self, file_path: Path) -> Optional[pd.DataFrame]:
        try:
            excel_file = pd.ExcelFile(file_path)
            # first sheet only
            return pd.read_excel(excel_file, sheet_name=excel_file.sheet_names[0])
        except Exception as e:
            logger.error(f"Error reading Excel {file_path.name}: {str(e)}")
            raise DataError(f"Could not read Excel table {file_path.name}: {e}")

    def ensure_dir(self, path: Path) -> Path:
        path.mkdir(parents=True, exist_ok=True)
        return path

    def write_text(self, path: Path, text: str) -> Path:
        self.ensure_dir(path.parent)
        path.write_text(text, encoding='utf-8', newline='\n')
        return path

    def write_csv(self, path: Path, frame: pd.DataFrame) -> Path:
        self.ensure_dir(path.parent)
        frame.to_csv(path, index=False, lineterminator='\n')
        return path

    def write_json(self, path: Path, payload: Any) -> Path:
        return self.write_text(path, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")

    def write_jsonl(self, path: Path, records: List[Dict[str, Any]]) -> Path:
        lines = [json.dumps(_jsonable(record), sort_keys=True) for record in records]
        return self.write_text(path, "\n".join(lines) + ("\n" if lines else ""))

    def read_json(self, path: Path) -> Any:
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except FileNotFoundError:
            raise DataError(f"File not found: {path}")
        except json.JSONDecodeError as e:
            raise DataError(f"Malformed JSON {path}: {e}")

    def file_hash(self, path: Path) -> str:
        digest = hashlib.sha256()
        with open(path, 'rb') as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b''):
                digest.update(chunk)
        return digest.hexdigest()

    def write_manifest(self, outdir: Path) -> Path:
        """List every artifact under outdir with its sha256"""
        manifest_path = outdir / "MANIFEST"
        entries = []
        for path in sorted(p for p in outdir.rglob('*') if p.is_file() and p != manifest_path):
            entries.append(f"{self.file_hash(path)}  {path.relative_to(outdir).as_posix()}")
        return self.write_text(manifest_path, "\n".join(entries) + "\n")
