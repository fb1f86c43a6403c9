"""Text formats: DIMACS input, 3DT files and the assembling metadata sidecar."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import AssemblyError, FormatError
from .gadgets import Assembling, BlockSpec, assemble
from .reduction import Clause, CnfFormula
from .tdt import TdtInstance

PathLike = Union[str, Path]


def parse_dimacs(text: str) -> CnfFormula:
    m = n_clauses = None
    clauses: list[Clause] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if m is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {lineno}: malformed header {line!r}")
            try:
                m, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: malformed header {line!r}") from None
            if m < 0 or n_clauses < 0:
                raise FormatError(f"line {lineno}: negative counts in header")
            continue
        if m is None:
            raise FormatError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > m:
                raise FormatError(f"line {lineno}: literal {lit} out of range for {m} variables")
            else:
                current.append(lit)
    if m is None:
        raise FormatError("missing 'p cnf' header")
    if current:
        raise FormatError("last clause is missing its 0 terminator")
    if any(not c for c in clauses):
        raise FormatError("empty clause")
    if len(clauses) != n_clauses:
        raise FormatError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(m, tuple(clauses))


def read_dimacs(path: PathLike) -> CnfFormula:
    return parse_dimacs(Path(path).read_text())


def roundtrip_3dt(text: str) -> TdtInstance:
    """Parse a 3DT file that must already be in canonical form."""
    inst = TdtInstance.parse(text)
    canonical = inst.serialize()
    if _normalize_newlines(text) != canonical:
        raise FormatError("3DT text is not in canonical form (triples in first-occurrence order)")
    return inst


def _normalize_newlines(text: str) -> str:
    return "\n".join(line.rstrip() for line in text.strip().splitlines()) + "\n"


def load_3dt(path: PathLike) -> TdtInstance:
    """Lenient load: any triple order is accepted."""
    return TdtInstance.parse(Path(path).read_text())


def save_3dt(path: PathLike, inst: TdtInstance) -> None:
    Path(path).write_text(inst.serialize())


def default_meta_path(path: PathLike) -> Path:
    return Path(str(path) + ".meta.json")


def write_meta(path: PathLike, meta: dict) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=False) + "\n")


def read_meta(path: PathLike) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


def assembling_from_meta(meta: dict, inst: TdtInstance) -> Assembling:
    """Rebuild the assembling described by ``meta`` and check it matches ``inst``."""
    try:
        specs = [BlockSpec(b["kind"], tuple(b["inputs"]), tuple(b["outputs"])) for b in meta["blocks"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"metadata lacks block descriptions: {exc}") from None
    asm = assemble(specs)
    if asm.instance.word != inst.word or set(asm.instance.triples) != set(inst.triples):
        raise AssemblyError("3DT file does not match the assembling described by its metadata")
    return asm
