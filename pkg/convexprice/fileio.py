"""CSV and JSON readers and writers for the command-line tool."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from convexprice.distribution import PreferenceCdf, PurchaseRecord, cdf_from_json
from convexprice.errors import EmptyHistory, EmptyMarket, InputFormatError
from convexprice.frontier import FrontierClassification
from convexprice.logs import get_logger
from convexprice.market_model import MarketSnapshot, NormalizationConfig, RawListing, normalize_market
from convexprice.preference import ShareTable

log = get_logger(__name__)

LISTING_COLUMNS = ("id", "price", "reputation")
HISTORY_COLUMNS = ("market_label", "id", "price", "reputation", "chosen")
FLOAT_FORMAT = "%.12g"

PathLike = Union[str, Path]


def fmt(value: float) -> str:
    return format(value, ".12g")


def _read_frame(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except FileNotFoundError as exc:
        raise InputFormatError(f"{path}: no such file") from exc
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(columns))
    except pd.errors.ParserError as exc:
        raise InputFormatError(f"{path}: invalid CSV ({exc})") from exc
    except UnicodeDecodeError as exc:
        raise InputFormatError(f"{path}: not valid UTF-8") from exc

    frame.columns = [str(column).strip() for column in frame.columns]
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise InputFormatError(f"{path}: missing column(s) {', '.join(missing)}")
    for column in columns:
        if column in ("id", "market_label"):
            if frame[column].isna().any():
                raise InputFormatError(f"{path}: empty {column} value")
            frame[column] = frame[column].astype(str).str.strip()
            continue
        values = pd.to_numeric(frame[column], errors="coerce")
        if values.isna().any():
            row = int(values.isna().to_numpy().nonzero()[0][0]) + 2
            raise InputFormatError(f"{path}: line {row}: {column} is not a number")
        frame[column] = values.astype(float)
    return frame


def _listings(frame: pd.DataFrame) -> list[RawListing]:
    return [
        RawListing(str(row.id), float(row.price), float(row.reputation))
        for row in frame.itertuples(index=False)
    ]


def read_listings(path: PathLike) -> list[RawListing]:
    """Listings from a CSV with header ``id,price,reputation``.

    Raises:
        EmptyMarket: the file has no data rows.
        InputFormatError: missing columns or non-numeric values.
    """
    frame = _read_frame(path, LISTING_COLUMNS)
    if frame.empty:
        raise EmptyMarket(f"{path}: no listings")
    log.debug("listings_read", path=str(path), rows=len(frame))
    return _listings(frame)


def read_history(path: PathLike, config: NormalizationConfig = NormalizationConfig()) -> list[PurchaseRecord]:
    """Purchase records from a CSV with header ``market_label,id,price,reputation,chosen``.

    Rows sharing a ``market_label`` form one market snapshot, normalized on
    its own; exactly one row per market has ``chosen = 1``.
    """
    frame = _read_frame(path, HISTORY_COLUMNS)
    if frame.empty:
        raise EmptyHistory(f"{path}: no purchase records")
    if not frame["chosen"].isin([0.0, 1.0]).all():
        raise InputFormatError(f"{path}: chosen must be 0 or 1")

    records = []
    for label, group in frame.groupby("market_label", sort=False):
        chosen = group.loc[group["chosen"] == 1.0, "id"].tolist()
        if len(chosen) != 1:
            raise InputFormatError(f"{path}: market {label!r} has {len(chosen)} chosen rows, expected exactly 1")
        market = normalize_market(_listings(group), config, label=str(label))
        records.append(PurchaseRecord(market, chosen[0], user_id=str(label)))
    log.debug("history_read", path=str(path), records=len(records))
    return records


def read_cdf(path: PathLike) -> PreferenceCdf:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot read ({exc.strerror})") from exc
    except UnicodeDecodeError as exc:
        raise InputFormatError(f"{path}: not valid UTF-8") from exc
    return cdf_from_json(text)


def parse_normalization(value: Optional[str]) -> Optional[NormalizationConfig]:
    """A NormalizationConfig from inline JSON or from a JSON file path."""
    if value is None:
        return None
    text = value
    if not value.lstrip().startswith("{"):
        try:
            text = Path(value).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputFormatError(f"{value}: cannot read normalization config") from exc
        except UnicodeDecodeError as exc:
            raise InputFormatError(f"{value}: not valid UTF-8") from exc
    try:
        return NormalizationConfig.model_validate_json(text)
    except ValidationError as exc:
        raise InputFormatError(f"invalid normalization config: {exc}") from exc


def _to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def frontier_csv(market: MarketSnapshot, classification: FrontierClassification) -> str:
    frame = pd.DataFrame(
        {
            "id": [item.id for item in market],
            "ln_p": [item.ln_p for item in market],
            "ln_r": [item.ln_r for item in market],
            "role": [classification.role_of(item.id).value for item in market],
        }
    )
    return _to_csv(frame)


def shares_csv(table: ShareTable) -> str:
    """One row per frontier vertex, in frontier order."""
    rows = [(row.id, row.interval.lo, row.interval.hi, row.share) for row in table.rows]
    return _to_csv(pd.DataFrame(rows, columns=["id", "alpha_lo", "alpha_hi", "share"]))


def curve_csv(curve: Iterable[tuple[float, float, float]]) -> str:
    return _to_csv(pd.DataFrame(list(curve), columns=["p", "share", "profit"]))


def dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_text(text: str, path: Optional[PathLike]) -> None:
    """Write to ``path``, or to stdout when ``path`` is ``None``."""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot write ({exc.strerror})") from exc
