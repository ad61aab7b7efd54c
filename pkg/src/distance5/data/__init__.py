"""Checked-in transcriptions of figures; TW_DATA_DIR overrides the location."""
import os
from pathlib import Path


def data_dir() -> Path:
    env = os.environ.get("TW_DATA_DIR")
    return Path(env) if env else Path(__file__).resolve().parent
