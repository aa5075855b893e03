"""Exact exponent numerology for the MPZ estimates.

Variables are (varpi, delta, sigma).  A claim set lists sufficient
conditions for the Type I, II and III estimates at various multiplicities;
MPZ^(i)[varpi, delta] holds when some sigma satisfies the structural side
conditions together with one Type I, one Type II and (unless sigma > 1/6)
one Type III claim of multiplicity at most i.  Eliminating sigma gives a
finite union of open convex polygons in the (varpi, delta) plane.

Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

Q = Fraction
KINDS = ("typeI", "typeII", "typeIII")


@dataclass(frozen=True)
class LinearConstraint:
    """cw * varpi + cd * delta + cs * sigma  REL  rhs, with REL in {'<', '>'}."""

    cw: Fraction
    cd: Fraction
    cs: Fraction
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in ("<", ">"):
            raise ValueError(f"relation must be '<' or '>', got {self.rel!r}")
        for name in ("cw", "cd", "cs", "rhs"):
            object.__setattr__(self, name, Q(getattr(self, name)))

    def as_less(self) -> "LinearConstraint":
        """The same constraint written with '<'."""
        if self.rel == "<":
            return self
        return LinearConstraint(-self.cw, -self.cd, -self.cs, "<", -self.rhs)

    def lhs(self, w, d, s=0) -> Fraction:
        return self.cw * w + self.cd * d + self.cs * s

    def holds(self, w, d, s=0, strict: bool = True) -> bool:
        c = self.as_less()
        v = c.lhs(w, d, s)
        return v < c.rhs if strict else v <= c.rhs

    def normalized(self) -> "LinearConstraint":
        """Scale a '<' constraint so that its coefficients are coprime integers."""
        c = self.as_less()
        vals = [c.cw, c.cd, c.cs, c.rhs]
        den = math.lcm(*[v.denominator for v in vals])
        ints = [int(v * den) for v in vals]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        g = g or 1
        return LinearConstraint(*(Q(v, g) for v in ints[:3]), "<", Q(ints[3], g))

    def __str__(self):
        c = self
        coefs = [v for v in (c.cw, c.cd, c.cs) if v]
        if coefs and all(v < 0 for v in coefs):
            # -varpi < 0 reads better as varpi > 0
            c = LinearConstraint(-c.cw, -c.cd, -c.cs, ">" if c.rel == "<" else "<", -c.rhs)
        parts = []
        for coef, name in ((c.cw, "varpi"), (c.cd, "delta"), (c.cs, "sigma")):
            if coef:
                parts.append(name if coef == 1 else f"{coef}*{name}")
        return f"{' + '.join(parts) or '0'} {c.rel} {c.rhs}".replace("+ -", "- ")


@dataclass(frozen=True)
class Claim:
    kind: str
    multiplicity: int
    constraints: tuple[LinearConstraint, ...]
    deligne: bool = False
    source: str = ""


@dataclass
class ClaimSet:
    name: str
    claims: list[Claim]
    structural: list[LinearConstraint]
    omit_typeIII_above: Fraction | None = Q(1, 6)

    def of_kind(self, kind: str, i: int) -> list[Claim]:
        """Claims of the given kind usable at multiplicity i (multiplicity <= i)."""
        return [c for c in self.claims if c.kind == kind and c.multiplicity <= i]

    def without_deligne(self, name: str | None = None) -> "ClaimSet":
        return ClaimSet(
            name or self.name,
            [c for c in self.claims if not c.deligne],
            list(self.structural),
            self.omit_typeIII_above,
        )


# ---------------------------------------------------------------------------
# claims files


def parse_constraint(line: str) -> LinearConstraint:
    tok = line.split()
    if len(tok) != 8 or (tok[0].removeprefix("c"), tok[2].removeprefix("c"), tok[4].removeprefix("c")) != ("w", "d", "s"):
        raise ValueError(f"malformed constraint line: {line!r}")
    return LinearConstraint(Q(tok[1]), Q(tok[3]), Q(tok[5]), tok[6], Q(tok[7]))


def parse_claims(text: str, name: str = "") -> ClaimSet:
    claims: list[Claim] = []
    structural: list[LinearConstraint] = []
    omit: Fraction | None = None
    current = None
    header = None

    def flush():
        if header is not None and header[0] != "structural":
            kind, mult, deligne = header
            claims.append(Claim(kind, mult, tuple(current), deligne, f"{name}:{kind}^{mult}"))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            flush()
            words = line.strip("[]").split()
            if words[0] == "structural":
                header = ("structural",)
                current = structural
                continue
            if words[0] not in KINDS or len(words) < 2:
                raise ValueError(f"line {lineno}: bad section header {raw!r}")
            header = (words[0], int(words[1]), "deligne" in words[2:])
            current = []
            continue
        if "=" in line:
            key, value = (v.strip() for v in line.split("=", 1))
            if key == "name":
                name = name or value
            elif key == "omit_typeIII_above":
                omit = Q(value)
            else:
                raise ValueError(f"line {lineno}: unknown setting {key!r}")
            continue
        if current is None:
            raise ValueError(f"line {lineno}: constraint outside a section")
        current.append(parse_constraint(line))
    flush()
    return ClaimSet(name, claims, structural, omit)


def _read_resource(fname: str) -> str:
    return resources.files("mpzkit").joinpath("claims", fname).read_text()


def load_claims(path: str | Path, with_structural: bool = True) -> ClaimSet:
    """Read a claims file; the shared structural conditions are added unless present."""
    cs = parse_claims(Path(path).read_text(), Path(path).stem)
    if with_structural and not cs.structural:
        base = parse_claims(_read_resource("structural.claims"))
        cs.structural = base.structural
        if cs.omit_typeIII_above is None:
            cs.omit_typeIII_above = base.omit_typeIII_above
    return cs


def claim_sets(name: str) -> ClaimSet:
    base = parse_claims(_read_resource("structural.claims"))
    if name in ("newtypeFull", "newtypeElementary"):
        cs = parse_claims(_read_resource("newtype.claims"), name)
    elif name == "zhangOriginal":
        cs = parse_claims(_read_resource("zhang.claims"), name)
    elif name == "empty":
        cs = ClaimSet("empty", [], [])
    else:
        raise ValueError(f"unknown claim set {name!r}")
    cs.name = name
    cs.structural = base.structural
    cs.omit_typeIII_above = base.omit_typeIII_above
    if name == "newtypeElementary":
        cs = cs.without_deligne(name)
    return cs


# ---------------------------------------------------------------------------
# sigma elimination


def _branches(cs: ClaimSet, i: int) -> list[tuple[tuple[LinearConstraint, ...], str]]:
    """Each branch is a conjunction of constraints in (varpi, delta, sigma)."""
    out = []
    tI, tII, tIII = (cs.of_kind(k, i) for k in KINDS)
    third: list[tuple[tuple[LinearConstraint, ...], str]] = [(c.constraints, c.source) for c in tIII]
    if cs.omit_typeIII_above is not None:
        third.append(((LinearConstraint(0, 0, 1, ">", cs.omit_typeIII_above),), "sigma>omit"))
    for a, b, (c, label) in itertools.product(tI, tII, third):
        cons = tuple(cs.structural) + a.constraints + b.constraints + c
        out.append((cons, f"{a.source} & {b.source} & {label}"))
    return out


def _split_sigma(cons: Iterable[LinearConstraint]):
    """Lower bounds sigma > L, upper bounds sigma < U (as (cw, cd, const)), and sigma-free rest."""
    lower, upper, rest = [], [], []
    for c in cons:
        c = c.as_less()
        if c.cs == 0:
            rest.append(c)
            continue
        # cs * sigma < rhs - cw w - cd d
        bound = ((-c.cw) / c.cs, (-c.cd) / c.cs, c.rhs / c.cs)
        (upper if c.cs > 0 else lower).append(bound)
    return lower, upper, rest


def eliminate_sigma(cons: Sequence[LinearConstraint]) -> list[LinearConstraint]:
    """Fourier-Motzkin: the (varpi, delta) constraints equivalent to 'some sigma works'."""
    lower, upper, rest = _split_sigma(cons)
    out = list(rest)
    for (lw, ld, lc), (uw, ud, uc) in itertools.product(lower, upper):
        # lw w + ld d + lc < uw w + ud d + uc
        out.append(LinearConstraint(lw - uw, ld - ud, 0, "<", uc - lc))
    return out


@dataclass
class Polygon:
    """An open convex polygon {a w + b d < c for every constraint}."""

    constraints: list[LinearConstraint]
    label: str = ""

    def contains(self, w, d) -> bool:
        return all(c.holds(w, d) for c in self.constraints)

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        cons = [c.as_less() for c in self.constraints]
        pts = set()
        for c1, c2 in itertools.combinations(cons, 2):
            det = c1.cw * c2.cd - c1.cd * c2.cw
            if det == 0:
                continue
            w = (c1.rhs * c2.cd - c1.cd * c2.rhs) / det
            d = (c1.cw * c2.rhs - c1.rhs * c2.cw) / det
            if all(c.holds(w, d, strict=False) for c in cons):
                pts.add((w, d))
        return sorted(pts)

    def is_empty(self) -> bool:
        pts = self.vertices()
        if not pts:
            return True
        cw = sum(p[0] for p in pts) / len(pts)
        cd = sum(p[1] for p in pts) / len(pts)
        return not self.contains(cw, cd)

    def sup_linear(self, a, b) -> Fraction:
        return max(a * w + b * d for w, d in self.vertices())

    def irredundant(self) -> "Polygon":
        """Drop constraints implied by the others (the polygon must be bounded and nonempty)."""
        cons = [c.normalized() for c in self.constraints]
        uniq = list(dict.fromkeys(cons))
        kept = list(uniq)
        for c in uniq:
            others = [k for k in kept if k != c]
            if not others:
                continue
            trial = Polygon(others)
            if not _bounded(others):
                continue
            if trial.vertices() and trial.sup_linear(c.cw, c.cd) <= c.rhs:
                kept = others
        return Polygon(kept, self.label)

    def subset_of(self, other: "Polygon") -> bool:
        return all(all(c.holds(w, d, strict=False) for c in other.constraints) for w, d in self.vertices())


def _bounded(cons: Sequence[LinearConstraint]) -> bool:
    """Whether the closed polygon has bounded recession cone (checked on the 8 compass directions and normals)."""
    cons = [c.as_less() for c in cons]
    dirs = {(Q(1), Q(0)), (Q(-1), Q(0)), (Q(0), Q(1)), (Q(0), Q(-1))}
    for c in cons:
        dirs.add((c.cd, -c.cw))
        dirs.add((-c.cd, c.cw))
    for dw, dd in dirs:
        if (dw, dd) == (0, 0):
            continue
        if all(c.cw * dw + c.cd * dd <= 0 for c in cons):
            return False
    return True


@dataclass
class ExponentRegion:
    """A finite union of open convex polygons in the (varpi, delta) plane."""

    pieces: list[Polygon] = field(default_factory=list)

    def contains(self, w, d) -> bool:
        return any(p.contains(Q(w), Q(d)) for p in self.pieces)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def constraints(self) -> list[LinearConstraint]:
        """The half-planes of a single-piece region."""
        if len(self.pieces) != 1:
            raise ValueError(f"region has {len(self.pieces)} pieces, not one")
        return self.pieces[0].constraints

    def __str__(self):
        if not self.pieces:
            return "empty"
        return "\n  OR\n".join(" AND ".join(str(c) for c in p.constraints) for p in self.pieces)


def mpz_region(cs: ClaimSet, i: int) -> ExponentRegion:
    pieces = []
    for cons, label in _branches(cs, i):
        poly = Polygon(eliminate_sigma(cons), label)
        if poly.is_empty():
            continue
        pieces.append(poly.irredundant())
    # drop pieces contained in another one
    kept: list[Polygon] = []
    for idx, p in enumerate(pieces):
        dominated = any(
            p.subset_of(o) and (not o.subset_of(p) or j < idx) for j, o in enumerate(pieces) if j != idx
        )
        if not dominated:
            kept.append(p)
    return ExponentRegion(kept)


def sigma_interval(cs: ClaimSet, i: int, w, d) -> list[tuple[Fraction, Fraction]]:
    """The open set of admissible sigma at (varpi, delta), as sorted disjoint open intervals."""
    w, d = Q(w), Q(d)
    intervals = []
    for cons, _ in _branches(cs, i):
        lower, upper, rest = _split_sigma(cons)
        if not all(c.holds(w, d) for c in rest):
            continue
        lo = max(a * w + b * d + c for a, b, c in lower) if lower else None
        hi = min(a * w + b * d + c for a, b, c in upper) if upper else None
        if lo is None or hi is None:
            raise ValueError("sigma must be bounded on both sides by the structural conditions")
        if lo < hi:
            intervals.append((lo, hi))
    intervals.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in intervals:
        if merged and lo < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


@dataclass(frozen=True)
class Supremum:
    value: Fraction | None
    attained: bool

    def __str__(self):
        if self.value is None:
            return "empty"
        return f"{self.value} ({'attained' if self.attained else 'open'})"


def _sup_on_line(cons: Sequence[LinearConstraint], direction: Fraction | None) -> tuple[Fraction | None, bool]:
    """sup of varpi on a piece as delta -> 0+ (direction None) or along delta = c varpi."""
    lo: Fraction | None = None
    lo_open = True
    hi: Fraction | None = None
    hi_open = True
    for c in cons:
        c = c.as_less()
        if direction is None:
            # a w + b d < rhs for all small d > 0
            a, b = c.cw, c.cd
            if a == 0:
                if c.rhs > 0 or (c.rhs == 0 and b < 0):
                    continue
                return None, False
            edge = c.rhs / a
            open_edge = b >= 0  # at a w = rhs we need b d < 0 for small d > 0
            if a > 0:
                if hi is None or edge < hi:
                    hi, hi_open = edge, open_edge
                elif edge == hi:
                    hi_open = hi_open or open_edge
            else:
                if lo is None or edge > lo:
                    lo, lo_open = edge, open_edge
                elif edge == lo:
                    lo_open = lo_open or open_edge
        else:
            coef = c.cw + c.cd * direction
            if coef == 0:
                if c.rhs > 0:
                    continue
                return None, False
            edge = c.rhs / coef
            if coef > 0:
                hi = edge if hi is None else min(hi, edge)
            else:
                lo = edge if lo is None else max(lo, edge)
    if hi is None:
        raise ValueError("varpi is unbounded on this piece")
    if lo is not None and (lo > hi or (lo == hi and (lo_open or hi_open))):
        return None, False
    return hi, not hi_open if direction is None else False


def max_distribution_exponent(cs: ClaimSet, i: int, delta_policy: str | Fraction = "zero") -> Supremum:
    """Exact supremum of 2 varpi over the MPZ^(i) region.

    ``"zero"`` lets delta -> 0+; ``ray(c)`` (or a Fraction c) restricts to delta = c varpi.
    """
    direction = _parse_policy(delta_policy)
    best: Fraction | None = None
    attained = False
    for poly in mpz_region(cs, i).pieces:
        val, att = _sup_on_line(poly.constraints, direction)
        if val is None:
            continue
        if best is None or val > best:
            best, attained = val, att
        elif val == best:
            attained = attained or att
    if best is None:
        return Supremum(None, False)
    return Supremum(2 * best, attained)


def _parse_policy(policy) -> Fraction | None:
    if isinstance(policy, Fraction):
        return policy
    if isinstance(policy, (int,)):
        return Q(policy)
    p = str(policy).strip()
    if p == "zero":
        return None
    if p.startswith("ray(") and p.endswith(")"):
        return Q(p[4:-1])
    raise ValueError(f"unknown delta policy {policy!r}")


def region_equals(region: ExponentRegion, constraints: Sequence[LinearConstraint]) -> bool:
    """Exact equality of a single-piece region with the polygon cut out by ``constraints``."""
    if len(region.pieces) != 1:
        return False
    target = Polygon(list(constraints))
    mine = region.pieces[0]
    return mine.subset_of(target) and target.subset_of(mine)
