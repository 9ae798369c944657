"""LP-text and MPS writers/parsers plus the `name value` solution reader.

The documented subset covers exactly what the allocation models need:
minimization objective, <=, =, >= rows, finite/infinite column bounds,
and binary marks.  Variable names are the directory tokens (for example
``x.NY.t5.w3``), so a name in an exported file can be parsed back into
its (kind, region, period, scenario) key.  Files written here re-import
through the parsers in this module to a model identical up to row order,
and are accepted by the usual external solvers.
"""

from __future__ import annotations

import io

import numpy as np

from .model import MilpModel, Row

_INF = float("inf")


class FormatError(ValueError):
    pass


def _num(v: float) -> str:
    """Shortest exact decimal form; integers rendered bare."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def export_model(model: MilpModel, fmt: str) -> bytes:
    if fmt == "lp":
        return write_lp(model).encode("utf-8")
    if fmt == "mps":
        return write_mps(model).encode("utf-8")
    raise FormatError(f"unknown export format {fmt!r} (expected 'lp' or 'mps')")


# --- LP text -----------------------------------------------------------------

def _lp_terms(pairs, names) -> str:
    parts = []
    for col, coef in pairs:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        parts.append(f"{sign} {_num(mag)} {names[col]}")
    if not parts:
        return "0 ZERO_TERM"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def write_lp(model: MilpModel) -> str:
    out = io.StringIO()
    out.write(f"\\ {model.name}\n")
    out.write("Minimize\n")
    obj_pairs = [(j, c) for j, c in enumerate(model.objective) if c != 0.0]
    out.write(f" obj: {_lp_terms(obj_pairs, model.col_names)}\n")
    out.write("Subject To\n")
    for row in model.rows:
        sense = {"<=": "<=", ">=": ">=", "=": "="}[row.sense]
        out.write(f" {row.name}: {_lp_terms(row.coeffs, model.col_names)} {sense} {_num(row.rhs)}\n")
    out.write("Bounds\n")
    for j, name in enumerate(model.col_names):
        lo, up = model.col_lower[j], model.col_upper[j]
        if model.is_binary[j]:
            continue
        if lo == 0.0 and up == _INF:
            continue
        if lo == up:
            out.write(f" {name} = {_num(lo)}\n")
        elif lo == -_INF and up == _INF:
            out.write(f" {name} free\n")
        elif lo == -_INF:
            out.write(f" {name} <= {_num(up)}\n")
        elif up == _INF:
            out.write(f" {name} >= {_num(lo)}\n")
        else:
            out.write(f" {_num(lo)} <= {name} <= {_num(up)}\n")
    binaries = [model.col_names[j] for j in model.binary_columns]
    if binaries:
        out.write("Binaries\n")
        for name in binaries:
            out.write(f" {name}\n")
    out.write("End\n")
    return out.getvalue()


def _tokenize_lp(text: str) -> list[str]:
    tokens = []
    for line in text.splitlines():
        body = line.split("\\", 1)[0]
        body = body.replace("<=", " <= ").replace(">=", " >= ")
        for raw in body.split():
            if raw in ("<=", ">=", "="):
                tokens.append(raw)
            elif raw.endswith(":"):
                tokens.append(raw)
            else:
                tokens.append(raw)
    return tokens


_LP_SECTIONS = {
    "minimize": "objective", "minimise": "objective", "min": "objective",
    "maximize": "objective-max", "max": "objective-max",
    "subject": None, "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "binary", "binary": "binary", "bin": "binary",
    "general": "general", "generals": "general", "gen": "general",
    "end": "end",
}


def parse_lp(text: str | bytes) -> MilpModel:
    """Parse the LP subset written by `write_lp` (plus common variants)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    tokens = _tokenize_lp(text)

    cols: dict[str, int] = {}
    lower: list[float] = []
    upper: list[float] = []
    binary: list[bool] = []
    obj: dict[int, float] = {}
    rows: list[Row] = []

    def col_of(name: str) -> int:
        if name not in cols:
            cols[name] = len(lower)
            lower.append(0.0)
            upper.append(_INF)
            binary.append(False)
        return cols[name]

    i = 0
    section = None
    maximize = False
    explicit_bounds: set[int] = set()

    def read_expr(start):
        """Linear expression until a sense token or section keyword."""
        pairs: list[tuple[int, float]] = []
        sign = 1.0
        coef = None
        k = start
        while k < len(tokens):
            tok = tokens[k]
            low = tok.lower()
            if tok in ("<=", ">=", "=") or low in _LP_SECTIONS or tok.endswith(":"):
                break
            if tok == "+":
                sign, coef = 1.0, coef
            elif tok == "-":
                sign = -sign
            else:
                try:
                    value = float(tok)
                    coef = value if coef is None else coef * value
                except ValueError:
                    c = sign * (1.0 if coef is None else coef)
                    if tok != "ZERO_TERM":
                        pairs.append((col_of(tok), c))
                    sign, coef = 1.0, None
            k += 1
        return pairs, k

    pending_name = None
    while i < len(tokens):
        tok = tokens[i]
        low = tok.lower()
        if low in _LP_SECTIONS:
            kind = _LP_SECTIONS[low]
            if low == "subject":
                if i + 1 < len(tokens) and tokens[i + 1].lower() == "to":
                    i += 1
                section = "rows"
            elif kind == "objective-max":
                section, maximize = "objective", True
            elif kind == "end":
                break
            else:
                section = kind
            i += 1
            continue

        if section == "objective":
            if tok.endswith(":"):
                i += 1
                continue
            pairs, i = read_expr(i)
            for col, coef in pairs:
                obj[col] = obj.get(col, 0.0) + coef
            continue

        if section == "rows":
            if tok.endswith(":"):
                pending_name = tok[:-1]
                i += 1
                continue
            pairs, i = read_expr(i)
            if i >= len(tokens) or tokens[i] not in ("<=", ">=", "="):
                raise FormatError(f"row {pending_name or '?'} missing sense")
            sense = tokens[i]
            i += 1
            try:
                rhs = float(tokens[i])
            except (IndexError, ValueError):
                raise FormatError(f"row {pending_name or '?'} missing rhs") from None
            i += 1
            name = pending_name or f"r{len(rows)}"
            pending_name = None
            rows.append(Row(name=name, coeffs=tuple(pairs), sense=sense, rhs=rhs))
            continue

        if section == "bounds":
            # forms: "lo <= name <= up" | "name <= up" | "name >= lo"
            #        | "name = v" | "name free"
            def is_number(t):
                try:
                    float(t)
                    return True
                except ValueError:
                    return False

            if is_number(tok):
                lo_v = float(tok)
                if tokens[i + 1] != "<=":
                    raise FormatError(f"malformed bound near {tok!r}")
                name = tokens[i + 2]
                j = col_of(name)
                lower[j] = lo_v
                explicit_bounds.add(j)
                i += 3
                if i < len(tokens) and tokens[i] == "<=":
                    upper[j] = float(tokens[i + 1])
                    i += 2
                else:
                    upper[j] = _INF
                continue
            name = tok
            j = col_of(name)
            nxt = tokens[i + 1] if i + 1 < len(tokens) else ""
            if nxt.lower() == "free":
                lower[j], upper[j] = -_INF, _INF
                explicit_bounds.add(j)
                i += 2
            elif nxt in ("<=", ">=", "="):
                v = float(tokens[i + 2])
                if nxt == "<=":
                    upper[j] = v
                elif nxt == ">=":
                    lower[j] = v
                else:
                    lower[j] = upper[j] = v
                explicit_bounds.add(j)
                i += 3
            else:
                raise FormatError(f"malformed bound near {tok!r}")
            continue

        if section in ("binary", "general"):
            j = col_of(tok)
            if section == "binary":
                binary[j] = True
                if j not in explicit_bounds:
                    lower[j], upper[j] = 0.0, 1.0
            i += 1
            continue

        raise FormatError(f"unexpected token {tok!r} before any section")

    objective = np.zeros(len(lower))
    for j, c in obj.items():
        objective[j] = -c if maximize else c
    names = [None] * len(lower)
    for name, j in cols.items():
        names[j] = name
    return MilpModel(
        name="imported_lp",
        col_names=list(names),
        col_lower=np.array(lower),
        col_upper=np.array(upper),
        is_binary=np.array(binary, dtype=bool),
        objective=objective,
        rows=rows,
        directory=None,
    )


# --- MPS ---------------------------------------------------------------------

def write_mps(model: MilpModel) -> str:
    out = io.StringIO()
    out.write(f"NAME {model.name}\n")
    out.write("ROWS\n")
    out.write(" N obj\n")
    sense_char = {"<=": "L", ">=": "G", "=": "E"}
    for row in model.rows:
        out.write(f" {sense_char[row.sense]} {row.name}\n")

    by_col: list[list[tuple[str, float]]] = [[] for _ in range(model.num_cols)]
    for row in model.rows:
        for col, coef in row.coeffs:
            by_col[col].append((row.name, coef))

    out.write("COLUMNS\n")
    in_int = False
    marker = 0
    for j, name in enumerate(model.col_names):
        if model.is_binary[j] and not in_int:
            out.write(f"    MARKER{marker} 'MARKER' 'INTORG'\n")
            marker += 1
            in_int = True
        elif not model.is_binary[j] and in_int:
            out.write(f"    MARKER{marker} 'MARKER' 'INTEND'\n")
            marker += 1
            in_int = False
        entries = list(by_col[j])
        if model.objective[j] != 0.0:
            entries.append(("obj", float(model.objective[j])))
        if not entries:
            entries.append(("obj", 0.0))
        for row_name, coef in entries:
            out.write(f"    {name} {row_name} {_num(coef)}\n")
    if in_int:
        out.write(f"    MARKER{marker} 'MARKER' 'INTEND'\n")

    out.write("RHS\n")
    for row in model.rows:
        if row.rhs != 0.0:
            out.write(f"    RHS1 {row.name} {_num(row.rhs)}\n")

    out.write("BOUNDS\n")
    for j, name in enumerate(model.col_names):
        lo, up = model.col_lower[j], model.col_upper[j]
        if model.is_binary[j]:
            out.write(f" BV BND1 {name}\n")
            continue
        if lo == 0.0 and up == _INF:
            continue
        if lo == up:
            out.write(f" FX BND1 {name} {_num(lo)}\n")
            continue
        if lo == -_INF and up == _INF:
            out.write(f" FR BND1 {name}\n")
            continue
        if lo != 0.0:
            if lo == -_INF:
                out.write(f" MI BND1 {name}\n")
            else:
                out.write(f" LO BND1 {name} {_num(lo)}\n")
        if up != _INF:
            out.write(f" UP BND1 {name} {_num(up)}\n")
    out.write("ENDATA\n")
    return out.getvalue()


def parse_mps(text: str | bytes) -> MilpModel:
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    name = "imported_mps"
    section = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    obj_row = None
    cols: dict[str, int] = {}
    col_names: list[str] = []
    lower: list[float] = []
    upper: list[float] = []
    binary: list[bool] = []
    integer_mode = False
    coeffs: dict[str, dict[int, float]] = {}
    obj: dict[int, float] = {}
    rhs: dict[str, float] = {}
    bound_seen: dict[int, set[str]] = {}

    def col_of(cname: str) -> int:
        if cname not in cols:
            cols[cname] = len(col_names)
            col_names.append(cname)
            lower.append(0.0)
            upper.append(_INF)
            binary.append(False)
        return cols[cname]

    sense_map = {"L": "<=", "G": ">=", "E": "="}

    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        head = raw.split()
        keyword = head[0].upper()
        if not raw[0].isspace() and keyword in (
            "NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "OBJSENSE", "ENDATA"
        ):
            section = keyword
            if keyword == "NAME" and len(head) > 1:
                name = head[1]
            if keyword == "ENDATA":
                break
            continue

        parts = raw.split()
        if section == "ROWS":
            rtype, rname = parts[0].upper(), parts[1]
            if rtype == "N":
                if obj_row is None:
                    obj_row = rname
            else:
                row_sense[rname] = sense_map[rtype]
                row_order.append(rname)
                coeffs[rname] = {}
        elif section == "COLUMNS":
            if len(parts) >= 3 and parts[1].strip("'\"").upper() == "MARKER":
                mode = parts[2].strip("'\"").upper()
                integer_mode = mode == "INTORG"
                continue
            cname = parts[0]
            j = col_of(cname)
            if integer_mode:
                binary[j] = True     # documented subset: integers are binaries
                if upper[j] == _INF:
                    upper[j] = 1.0
            for k in range(1, len(parts) - 1, 2):
                rname, value = parts[k], float(parts[k + 1])
                if rname == obj_row:
                    obj[j] = obj.get(j, 0.0) + value
                elif rname in coeffs:
                    coeffs[rname][j] = coeffs[rname].get(j, 0.0) + value
                else:
                    raise FormatError(f"coefficient for unknown row {rname!r}")
        elif section == "RHS":
            for k in range(1, len(parts) - 1, 2):
                rname, value = parts[k], float(parts[k + 1])
                if rname != obj_row:
                    rhs[rname] = value
        elif section == "BOUNDS":
            btype = parts[0].upper()
            j = col_of(parts[2])
            seen = bound_seen.setdefault(j, set())
            value = float(parts[3]) if len(parts) > 3 else None
            if btype == "UP":
                upper[j] = value
            elif btype == "LO":
                lower[j] = value
            elif btype == "FX":
                lower[j] = upper[j] = value
            elif btype == "FR":
                lower[j], upper[j] = -_INF, _INF
            elif btype == "MI":
                lower[j] = -_INF
            elif btype == "PL":
                upper[j] = _INF
            elif btype == "BV":
                binary[j] = True
                lower[j], upper[j] = 0.0, 1.0
            elif btype == "UI":
                binary[j] = True
                upper[j] = value
            else:
                raise FormatError(f"unsupported bound type {btype!r}")
            seen.add(btype)
        elif section == "RANGES":
            raise FormatError("RANGES section not supported")

    rows = [
        Row(name=r, coeffs=tuple(coeffs[r].items()), sense=row_sense[r], rhs=rhs.get(r, 0.0))
        for r in row_order
    ]
    objective = np.zeros(len(col_names))
    for j, c in obj.items():
        objective[j] = c
    return MilpModel(
        name=name,
        col_names=col_names,
        col_lower=np.array(lower),
        col_upper=np.array(upper),
        is_binary=np.array(binary, dtype=bool),
        objective=objective,
        rows=rows,
        directory=None,
    )


# --- solution files ----------------------------------------------------------

def read_solution(text: str | bytes) -> dict[str, float]:
    """Parse `name value` lines (the common external-solver .sol layout)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    values: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#") or body.startswith("*"):
            continue
        parts = body.split()
        if len(parts) < 2:
            raise FormatError(f"solution line {lineno} has no value: {line!r}")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            # tolerate headers like "Objective value = ..."
            if lineno == 1:
                continue
            raise FormatError(f"solution line {lineno} not numeric: {line!r}") from None
    return values


def write_solution(model: MilpModel, values: np.ndarray) -> str:
    lines = [f"{name} {repr(float(values[j]))}" for j, name in enumerate(model.col_names)]
    return "\n".join(lines) + "\n"


def assignment_from_names(model: MilpModel, named: dict[str, float]) -> np.ndarray:
    """Column vector from a name->value map; absent names default to zero."""
    x = np.zeros(model.num_cols)
    index = {name: j for j, name in enumerate(model.col_names)}
    for name, value in named.items():
        j = index.get(name)
        if j is not None:
            x[j] = value
    return x
