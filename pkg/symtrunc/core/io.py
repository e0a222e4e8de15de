"""
Input/Output module for the symtrunc package.

This module contains functions for reading and writing step functions,
sampled functions, interval families, certificates and verification
bundles as JSON and CSV files.
"""

import os
import json
import logging
import tempfile
from typing import Any, Dict, Optional, Tuple, Union

import pandas as pd

from symtrunc.core.domain import SampledFunction, domain_from_dict
from symtrunc.core.majorize import IntervalFamily, MajorizationCertificate
from symtrunc.core.stepfn import StepFunction
from symtrunc.core.verify import VerificationReport, to_jsonable

logger = logging.getLogger(__name__)


def atomic_write(filepath: str, text: str) -> None:
    """
    Write ``text`` to ``filepath`` through a temporary file in the same
    directory, so readers never see a partial file.
    """
    directory = os.path.dirname(os.path.abspath(filepath))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(filepath))
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp_path, filepath)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def read_json(filepath: str) -> Dict[str, Any]:
    """
    Read a JSON document.

    Parameters
    ----------
    filepath : str
        Path to the JSON file

    Returns
    -------
    dict
        The parsed document
    """
    try:
        logger.info(f"Reading JSON file: {filepath}")
        with open(filepath, "r") as f:
            return json.load(f)
    except Exception as e:
        logger.error(f"Error reading JSON file {filepath}: {str(e)}")
        raise


def write_json(data: Any, filepath: str) -> None:
    """
    Write a JSON document with sorted keys and two-space indentation.

    Parameters
    ----------
    data : object
        JSON-serializable data; numpy values and non-finite floats are
        converted first
    filepath : str
        Path where to save the JSON file
    """
    try:
        logger.info(f"Writing JSON file: {filepath}")
        atomic_write(filepath, json.dumps(to_jsonable(data), sort_keys=True, indent=2) + "\n")
    except Exception as e:
        logger.error(f"Error writing JSON file {filepath}: {str(e)}")
        raise


def write_csv(frame: pd.DataFrame, filepath: str) -> None:
    """Write a data frame as CSV without the index."""
    try:
        logger.info(f"Writing CSV file: {filepath}")
        atomic_write(filepath, frame.to_csv(index=False, float_format="%.17g"))
    except Exception as e:
        logger.error(f"Error writing CSV file {filepath}: {str(e)}")
        raise


def read_csv(filepath: str) -> pd.DataFrame:
    """Read a CSV file into a data frame."""
    try:
        logger.info(f"Reading CSV file: {filepath}")
        return pd.read_csv(filepath)
    except Exception as e:
        logger.error(f"Error reading CSV file {filepath}: {str(e)}")
        raise


def read_function(filepath: str) -> Union[StepFunction, SampledFunction]:
    """
    Read a step function on (0, 1] or a sampled function on a domain.

    Step functions are stored as ``{"breakpoints": [...], "values": [...]}``;
    sampled functions as a domain document with ``values``, and a
    ``resolution`` so that the grid can be regenerated.

    Raises
    ------
    ValueError
        If the document is neither form.
    """
    data = read_json(filepath)
    if "breakpoints" in data:
        return StepFunction.from_dict(data)
    if "shape" in data:
        domain, values = domain_from_dict(data)
        if values is None:
            raise ValueError(f"{filepath} describes a domain without values")
        return SampledFunction(domain, values)
    raise ValueError(f"{filepath} holds neither a step function nor a sampled function")


def write_function(f: Union[StepFunction, SampledFunction], filepath: str) -> None:
    """Write a step function or a sampled function as JSON."""
    write_json(f.to_dict(), filepath)


def read_family(filepath: str) -> IntervalFamily:
    """Read an interval family ``{"intervals": [[a1, b1], ...]}``."""
    return IntervalFamily.from_dict(read_json(filepath))


def write_certificate(certificate: MajorizationCertificate, filepath: str) -> None:
    write_json(certificate.to_dict(), filepath)


def read_pair(filepath: str) -> Tuple[StepFunction, StepFunction]:
    """Read a pair ``{"g": {...}, "h": {...}}`` of step functions."""
    data = read_json(filepath)
    try:
        return StepFunction.from_dict(data["g"]), StepFunction.from_dict(data["h"])
    except KeyError as e:
        raise ValueError(f"{filepath} is missing step function {e}")


def write_bundle(
    report: VerificationReport,
    out_dir: str,
    timings: Optional[Dict[str, Dict[str, float]]] = None,
) -> str:
    """
    Write a verification bundle: ``report.json``, one CSV per ratio curve and,
    when given, ``timings.json``.

    Parameters
    ----------
    report : VerificationReport
        Report to write.
    out_dir : str
        Output directory, created when missing.
    timings : dict, optional
        Per-job profile statistics, kept apart from the report.

    Returns
    -------
    str
        Path of ``report.json``.
    """
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.json")
    atomic_write(report_path, report.to_json() + "\n")
    for record in report.records:
        for resolution, curve in sorted(record.curves.items()):
            write_csv(curve, os.path.join(out_dir, record.curve_file(resolution)))
    if timings:
        write_json(timings, os.path.join(out_dir, "timings.json"))
    logger.info(f"Verification bundle written to {out_dir}")
    return report_path
