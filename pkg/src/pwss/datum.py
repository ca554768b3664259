"""Resolution data: validated cohomology packages for singular varieties.

An :class:`OrdinaryDatum` describes a resolution with smooth exceptional
divisor (dimension n): the algebras H*(X̃) and H*(D), the restriction j,
the Gysin maps γ, and Poincaré pairings. A :class:`SurfaceDatum` (n = 2)
describes a normal crossings resolution of a surface: curves D̃, double
points Z, the two point inclusions i1, i2 and their Gysin maps η1, η2.

``load_datum`` validates the JSON schema first, then every structural
invariant (adjointness, projection formula, multiplicativity of j, the
semipurity ranks); failures are collected and reported together.
"""

from __future__ import annotations

import json
from fractions import Fraction

import jsonschema

from .cdga import CDGA, CDGAMorphism, GradedVectorSpace, Product, validate_cdga
from .errors import (
    DegenerateHyperplaneClass,
    InvariantViolation,
    SchemaError,
)
from .linalg import Matrix, Q0, Q1, image, kernel

# ---------------------------------------------------------------------------
# serialization helpers


def _ser_frac(v):
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _de_frac(s):
    return Fraction(s)


def _ser_matrix(m):
    return {
        "rows": m.nrows,
        "cols": m.ncols,
        "entries": [[_ser_frac(v) for v in row] for row in m.rows],
    }


def _de_matrix(obj):
    if obj["rows"] == 0:
        return Matrix([], obj["cols"])
    return Matrix([[_de_frac(v) for v in row] for row in obj["entries"]], obj["cols"])


_MATRIX_SCHEMA = {
    "type": "object",
    "required": ["rows", "cols", "entries"],
    "properties": {
        "rows": {"type": "integer", "minimum": 0},
        "cols": {"type": "integer", "minimum": 0},
        "entries": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}},
        },
    },
}

_ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["dims", "d", "mu", "pairing", "unit"],
    "properties": {
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "unit": {"type": "array", "items": {"type": "string"}},
        "d": {"type": "array", "items": _MATRIX_SCHEMA},
        "mu": {
            "anyOf": [
                {"type": "null"},
                {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["i", "j", "entries"],
                        "properties": {
                            "i": {"type": "integer"},
                            "j": {"type": "integer"},
                            "entries": {
                                "type": "array",
                                "items": {
                                    "type": "array",
                                    "minItems": 4,
                                    "maxItems": 4,
                                },
                            },
                        },
                    },
                },
            ]
        },
        "pairing": {"type": "array", "items": _MATRIX_SCHEMA},
    },
}

DATUM_SCHEMA = {
    "type": "object",
    "required": ["kind", "n", "hx", "maps", "sigma_count", "link_connected"],
    "properties": {
        "kind": {"enum": ["ordinary", "surface"]},
        "n": {"type": "integer", "minimum": 2},
        "hx": _ALGEBRA_SCHEMA,
        "hd": _ALGEBRA_SCHEMA,
        "hd1": _ALGEBRA_SCHEMA,
        "hz_dim": {"type": "integer", "minimum": 0},
        "maps": {
            "type": "object",
            "required": ["j", "gamma"],
            "properties": {
                "j": {"type": "array", "items": _MATRIX_SCHEMA},
                "gamma": {"type": "array", "items": _MATRIX_SCHEMA},
                "i1": _MATRIX_SCHEMA,
                "i2": _MATRIX_SCHEMA,
                "eta1": _MATRIX_SCHEMA,
                "eta2": _MATRIX_SCHEMA,
            },
        },
        "sigma_count": {"type": "integer", "minimum": 1},
        "link_connected": {"type": "boolean"},
    },
}


def _algebra_to_json(a, top):
    dims = [a.dim(k) for k in range(top + 1)]
    d = [_ser_matrix(a.diff(k)) for k in range(top + 1)]
    mu = []
    rank_only = getattr(a, "rank_only", False)
    if not rank_only:
        for i in range(top + 1):
            for j in range(i, top + 1 - i):
                entries = []
                for x in range(a.dim(i)):
                    for y in range(a.dim(j)):
                        sparse, _ = a.mul_basis(i, j, x, y)
                        for t, c in sparse:
                            entries.append([x, y, t, _ser_frac(c)])
                if a.dim(i) and a.dim(j):
                    mu.append({"i": i, "j": j, "entries": entries})
    pairing = [
        _ser_matrix(p) for p in getattr(a, "pairings", [])
    ]
    return {
        "dims": dims,
        "d": d,
        "mu": mu if not rank_only else None,
        "pairing": pairing,
        "unit": [_ser_frac(v) for v in a.unit],
    }


def _algebra_from_json(obj, name):
    dims = {k: n for k, n in enumerate(obj["dims"]) if n}
    top = len(obj["dims"]) - 1
    space = GradedVectorSpace(dims)
    diffs = {}
    for k, mobj in enumerate(obj["d"]):
        m = _de_matrix(mobj)
        if not m.is_zero():
            diffs[k] = m
    rank_only = obj["mu"] is None
    if rank_only:
        product = Product()
    else:
        table = {}
        seen = {}
        for block in obj["mu"]:
            i, j = block["i"], block["j"]
            for x, y, t, c in block["entries"]:
                seen.setdefault((i, j, x, y), []).append((t, _de_frac(c)))
        for i in range(top + 1):
            for j in range(top + 1):
                for x in range(space.dim(i)):
                    for y in range(space.dim(j)):
                        if i <= j:
                            table[(i, j, x, y)] = seen.get((i, j, x, y), [])
                        else:
                            flipped = seen.get((j, i, y, x), [])
                            sign = Fraction((-1) ** (i * j))
                            table[(i, j, x, y)] = [(t, sign * c) for t, c in flipped]
        product = Product.from_table(table)
    unit = [_de_frac(v) for v in obj["unit"]]
    a = CDGA(space, diffs, product, unit, name=name)
    a.rank_only = rank_only
    a.pairings = [_de_matrix(p) for p in obj["pairing"]]
    return a


# ---------------------------------------------------------------------------
# data classes


class OrdinaryDatum:
    """Resolution datum with smooth exceptional divisor."""

    def __init__(self, n, HX, HD, j, gamma, sigma_count, link_connected=True):
        self.n = n
        self.HX = HX
        self.HD = HD
        self.j = j  # dict k -> Matrix HX^k -> HD^k
        self.gamma = gamma  # dict k -> Matrix HD^{k-2} -> HX^k
        self.sigma_count = sigma_count
        self.link_connected = link_connected
        self.kind = "ordinary"

    @property
    def rank_only(self):
        return getattr(self.HX, "rank_only", False) or getattr(
            self.HD, "rank_only", False
        )

    def j_map(self, k):
        return self.j.get(k, Matrix.zero(self.HD.dim(k), self.HX.dim(k)))

    def gamma_map(self, k):
        """γ^k: H^{k-2}(D) -> H^k(X̃)."""
        return self.gamma.get(k, Matrix.zero(self.HX.dim(k), self.HD.dim(k - 2)))

    def j_sharp(self, k):
        """j_#^k = j^k ∘ γ^k: H^{k-2}(D) -> H^k(D)."""
        return self.j_map(k) @ self.gamma_map(k)

    def pairing_x(self, k):
        return self.HX.pairings[k]

    def pairing_d(self, k):
        return self.HD.pairings[k]

    def to_json(self):
        return {
            "kind": "ordinary",
            "n": self.n,
            "hx": _algebra_to_json(self.HX, 2 * self.n),
            "hd": _algebra_to_json(self.HD, 2 * self.n - 2),
            "maps": {
                "j": [_ser_matrix(self.j_map(k)) for k in range(2 * self.n + 1)],
                "gamma": [
                    _ser_matrix(self.gamma_map(k)) for k in range(2 * self.n + 1)
                ],
            },
            "sigma_count": self.sigma_count,
            "link_connected": self.link_connected,
        }


class SurfaceDatum:
    """Normal crossings resolution datum of a surface (n = 2)."""

    def __init__(self, HX, HD1, hz_dim, i1, i2, eta1, eta2, j, gamma,
                 sigma_count, link_connected=True):
        self.n = 2
        self.HX = HX
        self.HD1 = HD1
        self.hz_dim = hz_dim
        self.i1 = i1  # H^0(D̃) -> H^0(Z)
        self.i2 = i2
        self.eta1 = eta1  # H^0(Z) -> H^2(D̃)
        self.eta2 = eta2
        self.j = j
        self.gamma = gamma  # dict k -> H^{k-2}(D̃) -> H^k(X̃)
        self.sigma_count = sigma_count
        self.link_connected = link_connected
        self.kind = "surface"

    @property
    def rank_only(self):
        return getattr(self.HX, "rank_only", False) or getattr(
            self.HD1, "rank_only", False
        )

    def j_map(self, k):
        return self.j.get(k, Matrix.zero(self.HD1.dim(k), self.HX.dim(k)))

    def gamma_map(self, k):
        return self.gamma.get(k, Matrix.zero(self.HX.dim(k), self.HD1.dim(k - 2)))

    def i_comb(self):
        """i* = i1 - i2."""
        return self.i1 - self.i2

    def eta_comb(self):
        return self.eta1 - self.eta2

    def j_sharp(self):
        """j_# = j^2 ∘ γ^2: H^0(D̃) -> H^2(D̃), the intersection matrix."""
        return self.j_map(2) @ self.gamma_map(2)

    def pairing_x(self, k):
        return self.HX.pairings[k]

    def pairing_d(self, k):
        return self.HD1.pairings[k]

    def to_json(self):
        return {
            "kind": "surface",
            "n": 2,
            "hx": _algebra_to_json(self.HX, 4),
            "hd1": _algebra_to_json(self.HD1, 2),
            "hz_dim": self.hz_dim,
            "maps": {
                "j": [_ser_matrix(self.j_map(k)) for k in range(5)],
                "gamma": [_ser_matrix(self.gamma_map(k)) for k in range(5)],
                "i1": _ser_matrix(self.i1),
                "i2": _ser_matrix(self.i2),
                "eta1": _ser_matrix(self.eta1),
                "eta2": _ser_matrix(self.eta2),
            },
            "sigma_count": self.sigma_count,
            "link_connected": self.link_connected,
        }


# ---------------------------------------------------------------------------
# validation


def _pairing_matrix_from_product(a, k, top, vol_functional):
    rows = []
    for x in range(a.dim(k)):
        row = []
        ex = tuple(Q1 if t == x else Q0 for t in range(a.dim(k)))
        for y in range(a.dim(top - k)):
            ey = tuple(Q1 if t == y else Q0 for t in range(a.dim(top - k)))
            prod, _ = a.mul_vec(k, ex, top - k, ey)
            row.append(sum(c * v for c, v in zip(vol_functional, prod)))
        rows.append(row)
    return Matrix(rows, a.dim(top - k))


def validate_ordinary(d):
    """Every OrdinaryDatum invariant as one list of named failures."""
    fails = []
    n = d.n
    HX, HD = d.HX, d.HD
    if HX.dim(0) != 1:
        fails.append("H^0(X~) must be Q")
    # pairings present and nondegenerate
    for name, a, top in (("X", HX, 2 * n), ("D", HD, 2 * n - 2)):
        if len(getattr(a, "pairings", [])) != top + 1:
            fails.append(f"pairing on H({name}) missing degrees")
            continue
        for k in range(top + 1):
            p = a.pairings[k]
            if p.nrows != a.dim(k) or p.ncols != a.dim(top - k):
                fails.append(f"pairing shape on H^{k}({name})")
            elif a.dim(k) and p.rank() != a.dim(k):
                fails.append(f"pairing degenerate on H^{k}({name})")
    if fails:
        return fails

    if not d.rank_only:
        rep = validate_cdga(HX, check_triples=False)
        if not rep.ok:
            fails.append(f"H(X~) not a cdga: {rep}")
        rep = validate_cdga(HD, check_triples=False)
        if not rep.ok:
            fails.append(f"H(D) not a cdga: {rep}")
        # j unital ring map
        jm = CDGAMorphism(HX, HD, {k: d.j_map(k) for k in range(2 * n + 1)}, name="j")
        if not jm.preserves_unit():
            fails.append("j not unital")
        ok, loc = jm.is_multiplicative()
        if not ok:
            fails.append(f"j not multiplicative at {loc}")
        # pairing consistency with products
        volx = _volume_functional(HX, 2 * n, fails, "X")
        vold = _volume_functional(HD, 2 * n - 2, fails, "D")
        if volx is not None:
            for k in range(2 * n + 1):
                if HX.pairings[k] != _pairing_matrix_from_product(HX, k, 2 * n, volx):
                    fails.append(f"pairing on H^{k}(X~) differs from product pairing")
        if vold is not None:
            for k in range(2 * n - 1):
                if HD.pairings[k] != _pairing_matrix_from_product(HD, k, 2 * n - 2, vold):
                    fails.append(f"pairing on H^{k}(D) differs from product pairing")
        # projection formula γ(a · j(x)) = γ(a) · x on basis pairs
        for ka in range(2 * n - 1):
            for kx in range(2 * n + 1):
                if ka + kx + 2 > 2 * n or not (HD.dim(ka) and HX.dim(kx)):
                    continue
                for a_i in range(HD.dim(ka)):
                    ea = tuple(Q1 if t == a_i else Q0 for t in range(HD.dim(ka)))
                    ga = d.gamma_map(ka + 2).apply(ea)
                    for x_i in range(HX.dim(kx)):
                        ex = tuple(Q1 if t == x_i else Q0 for t in range(HX.dim(kx)))
                        jx = d.j_map(kx).apply(ex)
                        ajx, _ = HD.mul_vec(ka, ea, kx, jx)
                        lhs = d.gamma_map(ka + kx + 2).apply(ajx)
                        rhs, _ = HX.mul_vec(ka + 2, ga, kx, ex)
                        if lhs != rhs:
                            fails.append(
                                f"projection formula fails at H^{ka}(D)xH^{kx}(X~)"
                            )
                            break
                    else:
                        continue
                    break
    # adjointness <γ(a), x>_X = <a, j(x)>_D, i.e. γ^T P_X = P_D j
    for k in range(2, 2 * n + 1):
        ka = k - 2
        kx = 2 * n - k
        if not (HD.dim(ka) and HX.dim(kx)):
            continue
        lhs = d.gamma_map(k).transpose() @ d.pairing_x(k)
        rhs = d.pairing_d(ka) @ d.j_map(kx)
        if lhs != rhs:
            fails.append(f"Gysin adjointness fails in degree {k}")
    # semipurity ranks (Lemma 4.2-style)
    for k in range(2, 2 * n + 1):
        js = d.j_sharp(k)
        if k <= n and HD.dim(k - 2) and kernel(js).dim:
            fails.append(f"j_#^{k} not injective")
        if k >= n and HD.dim(k) and image(js).dim != HD.dim(k):
            fails.append(f"j_#^{k} not surjective")
        g = d.gamma_map(k)
        if k <= n and HD.dim(k - 2) and kernel(g).dim:
            fails.append(f"gamma^{k} not injective")
    g2n = d.gamma_map(2 * n)
    if HX.dim(2 * n) and image(g2n).dim != HX.dim(2 * n):
        fails.append("gamma^{2n} not surjective")
    for k in range(n, 2 * n + 1):
        if HD.dim(k) and image(d.j_map(k)).dim != HD.dim(k):
            fails.append(f"j^{k} not surjective")
    # Poincaré duality dims (Lemma 4.1 shadow)
    for s in range(0, n + 1):
        k1 = n + s
        k2 = n - s
        if k1 < 2 or k1 > 2 * n:
            continue
        cok_g = HX.dim(k1) - image(d.gamma_map(k1)).dim
        ker_j = kernel(d.j_map(k2)).dim
        if cok_g != ker_j:
            fails.append(f"dim Coker(gamma^{k1}) != dim Ker(j^{k2})")
        ker_g = kernel(d.gamma_map(k1)).dim if HD.dim(k1 - 2) else 0
        cok_j = HD.dim(k2) - image(d.j_map(k2)).dim
        if ker_g != cok_j:
            fails.append(f"dim Ker(gamma^{k1}) != dim Coker(j^{k2})")
    return fails


def _volume_functional(a, top, fails, name):
    if a.dim(top) != a.dim(0):
        fails.append(f"H^0 and H^{top}({name}) dims differ")
        return None
    # the pairing against the unit: vol(y) = <1, y> = (P_0^T · unit)(y)
    p0 = a.pairings[0]
    if not p0.nrows:
        return None
    return p0.transpose().apply(a.unit)


def validate_surface(d):
    fails = []
    HX, HD1 = d.HX, d.HD1
    if HX.dim(0) != 1:
        fails.append("H^0(X~) must be Q")
    if HD1.dim(0) != HD1.dim(2):
        fails.append("H^0(D̃) and H^2(D̃) dims differ")
    for name, a, top in (("X", HX, 4), ("D1", HD1, 2)):
        if len(getattr(a, "pairings", [])) != top + 1:
            fails.append(f"pairing on H({name}) missing degrees")
            return fails
        for k in range(top + 1):
            p = a.pairings[k]
            if p.nrows != a.dim(k) or p.ncols != a.dim(top - k):
                fails.append(f"pairing shape on H^{k}({name})")
            elif a.dim(k) and p.rank() != a.dim(k):
                fails.append(f"pairing degenerate on H^{k}({name})")
    if fails:
        return fails

    if not d.rank_only:
        for a, nm in ((HX, "H(X~)"), (HD1, "H(D̃)")):
            rep = validate_cdga(a, check_triples=False)
            if not rep.ok:
                fails.append(f"{nm} not a cdga: {rep}")
        jm = CDGAMorphism(HX, HD1, {k: d.j_map(k) for k in range(3)}, name="j")
        if not jm.preserves_unit():
            fails.append("j not unital")
        ok, loc = jm.is_multiplicative()
        if not ok:
            fails.append(f"j not multiplicative at {loc}")
        # projection formula for γ: H^k(D̃) -> H^{k+2}(X̃)
        for ka in range(3):
            for kx in range(5):
                if ka + kx + 2 > 4 or not (HD1.dim(ka) and HX.dim(kx)):
                    continue
                for a_i in range(HD1.dim(ka)):
                    ea = tuple(Q1 if t == a_i else Q0 for t in range(HD1.dim(ka)))
                    ga = d.gamma_map(ka + 2).apply(ea)
                    for x_i in range(HX.dim(kx)):
                        ex = tuple(Q1 if t == x_i else Q0 for t in range(HX.dim(kx)))
                        jx = d.j_map(kx).apply(ex)
                        ajx, _ = HD1.mul_vec(ka, ea, kx, jx)
                        lhs = d.gamma_map(ka + kx + 2).apply(ajx)
                        rhs, _ = HX.mul_vec(ka + 2, ga, kx, ex)
                        if lhs != rhs:
                            fails.append(
                                f"projection formula fails at H^{ka}(D̃)xH^{kx}(X~)"
                            )
                            break
                    else:
                        continue
                    break

    # i* ∘ j^0 = 0 and γ ∘ η = 0
    if not ((d.i1 - d.i2) @ d.j_map(0)).is_zero():
        fails.append("i* ∘ j^0 != 0")
    if not (d.gamma_map(4) @ (d.eta1 - d.eta2)).is_zero():
        fails.append("gamma ∘ eta != 0")
    # adjointness of (i_k, eta_k): η_k^T P2 = i_k (Z carries the standard pairing)
    for ik, ek, nm in ((d.i1, d.eta1, "1"), (d.i2, d.eta2, "2")):
        if ek.transpose() @ d.pairing_d(2) != ik:
            fails.append(f"(i{nm}, eta{nm}) not adjoint")
    # j/γ adjointness in all degrees: γ^T P_X = P_D1 j
    for k in range(2, 5):
        ka, kx = k - 2, 4 - k
        if not (HD1.dim(ka) and HX.dim(kx)):
            continue
        lhs = d.gamma_map(k).transpose() @ d.pairing_x(k)
        rhs = d.pairing_d(ka) @ d.j_map(kx)
        if lhs != rhs:
            fails.append(f"Gysin adjointness fails in degree {k}")
    # semipurity: γ^2 injective, j^k surjective for k >= 2, γ^4 surjective,
    # and the exceptional intersection matrix j_# nondegenerate
    if HD1.dim(0) and kernel(d.gamma_map(2)).dim:
        fails.append("gamma^2 not injective (curve classes dependent)")
    for k in (2,):
        if HD1.dim(k) and image(d.j_map(k)).dim != HD1.dim(k):
            fails.append(f"j^{k} not surjective")
    if HX.dim(4) and image(d.gamma_map(4)).dim != HX.dim(4):
        fails.append("gamma^4 not surjective")
    js = d.j_sharp()
    if HD1.dim(0) and kernel(js).dim:
        fails.append("exceptional intersection matrix degenerate")
    if d.i1.nrows != d.hz_dim or d.i2.nrows != d.hz_dim:
        fails.append("i1/i2 target dimension != hz_dim")
    return fails


def validate_datum(d):
    if d.kind == "ordinary":
        return validate_ordinary(d)
    return validate_surface(d)


# ---------------------------------------------------------------------------
# loading


def load_datum(source):
    """Parse and validate a datum from a path, file object or dict.

    Raises SchemaError on malformed files, InvariantViolation with the full
    failure list otherwise; returns the validated datum.
    """
    if isinstance(source, dict):
        obj = source
    elif hasattr(source, "read"):
        obj = json.load(source)
    else:
        with open(source) as fh:
            obj = json.load(fh)
    try:
        jsonschema.validate(obj, DATUM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"datum schema: {exc.message}") from exc
    n = obj["n"]
    try:
        if obj["kind"] == "ordinary":
            HX = _algebra_from_json(obj["hx"], "H(X~)")
            if "hd" not in obj:
                raise SchemaError("ordinary datum needs 'hd'")
            HD = _algebra_from_json(obj["hd"], "H(D)")
            maps = obj["maps"]
            j = {k: _de_matrix(m) for k, m in enumerate(maps["j"])}
            gamma = {k: _de_matrix(m) for k, m in enumerate(maps["gamma"])}
            d = OrdinaryDatum(
                n, HX, HD, j, gamma, obj["sigma_count"], obj["link_connected"]
            )
        else:
            if n != 2:
                raise SchemaError("surface datum requires n = 2")
            for key in ("hd1", "hz_dim"):
                if key not in obj:
                    raise SchemaError(f"surface datum needs '{key}'")
            HX = _algebra_from_json(obj["hx"], "H(X~)")
            HD1 = _algebra_from_json(obj["hd1"], "H(D̃)")
            maps = obj["maps"]
            for key in ("i1", "i2", "eta1", "eta2"):
                if key not in maps:
                    raise SchemaError(f"surface datum needs maps.{key}")
            d = SurfaceDatum(
                HX,
                HD1,
                obj["hz_dim"],
                _de_matrix(maps["i1"]),
                _de_matrix(maps["i2"]),
                _de_matrix(maps["eta1"]),
                _de_matrix(maps["eta2"]),
                {k: _de_matrix(m) for k, m in enumerate(maps["j"])},
                {k: _de_matrix(m) for k, m in enumerate(maps["gamma"])},
                obj["sigma_count"],
                obj["link_connected"],
            )
    except (KeyError, AssertionError, ValueError) as exc:
        raise SchemaError(f"datum structure: {exc}") from exc
    fails = validate_datum(d)
    if fails:
        raise InvariantViolation(fails)
    return d


def save_datum(d, path):
    with open(path, "w") as fh:
        json.dump(d.to_json(), fh, indent=1)


# ---------------------------------------------------------------------------
# cone builder


def cone_datum(HS, w):
    """Ordinary datum of the projective cone over a surface (n = 3).

    HS is the cohomology cdga of the base (4-manifold Poincaré duality,
    zero differential); w the hyperplane class in H^2(S) with w·w != 0.
    The blown-up cone is the P^1-bundle: H(X̃) = H(S) ⊕ e·H(S) with
    e² = -e·w; j kills nothing (j(α) = α, j(eα) = -wα) and γ(α) = eα;
    the exceptional self-intersection class is -w.
    """
    w = tuple(Fraction(v) for v in w)
    assert len(w) == HS.dim(2)
    # w·w must be nonzero
    ev = HS.mul_vec(2, w, 2, w)[0]
    vol = _volume_functional_simple(HS, 4)
    wsq = sum(c * v for c, v in zip(vol, ev))
    if wsq == 0:
        raise DegenerateHyperplaneClass("w·w = 0")

    # basis of H^k(X̃): π*H^k(S) then e·H^{k-2}(S)
    n = 3
    dims, labels = {}, {}
    for k in range(0, 7):
        nk = HS.dim(k) + HS.dim(k - 2)
        if nk:
            dims[k] = nk
            labels[k] = [f"π·{HS.label(k, i)}" for i in range(HS.dim(k))] + [
                f"e·{HS.label(k - 2, i)}" for i in range(HS.dim(k - 2))
            ]
    space = GradedVectorSpace(dims, labels)

    def split(k, vec):
        return vec[: HS.dim(k)], vec[HS.dim(k) :]

    def assemble(k, pi_part, e_part):
        out = [Q0] * dims.get(k, 0)
        for i, c in enumerate(pi_part):
            out[i] = c
        for i, c in enumerate(e_part):
            out[HS.dim(k) + i] = c
        return out

    def mulw(kc, vec):
        """multiply by w inside H(S)."""
        return HS.mul_vec(2, w, kc, vec)[0]

    def cone_mul(i, j_, a, b):
        pa = [Q0] * HS.dim(i)
        ea = [Q0] * HS.dim(i - 2)
        if a < HS.dim(i):
            pa[a] = Q1
        else:
            ea[a - HS.dim(i)] = Q1
        pb = [Q0] * HS.dim(j_)
        eb = [Q0] * HS.dim(j_ - 2)
        if b < HS.dim(j_):
            pb[b] = Q1
        else:
            eb[b - HS.dim(j_)] = Q1
        k = i + j_
        if k > 6:
            return [], True
        # (πa)(πb) = π(ab); (πa)(eb) = e(ab); (ea)(πb) = e(ab); (ea)(eb) = -e(w a b)
        pp = HS.mul_vec(i, tuple(pa), j_, tuple(pb))[0] if HS.dim(i) and HS.dim(j_) else ()
        e_acc = [Q0] * HS.dim(k - 2)
        if HS.dim(i) and HS.dim(j_ - 2):
            v = HS.mul_vec(i, tuple(pa), j_ - 2, tuple(eb))[0]
            for t, c in enumerate(v):
                e_acc[t] += c
        if HS.dim(i - 2) and HS.dim(j_):
            v = HS.mul_vec(i - 2, tuple(ea), j_, tuple(pb))[0]
            for t, c in enumerate(v):
                e_acc[t] += c
        if HS.dim(i - 2) and HS.dim(j_ - 2):
            v = HS.mul_vec(i - 2, tuple(ea), j_ - 2, tuple(eb))[0]
            wv = mulw(i + j_ - 4, v)
            for t, c in enumerate(wv):
                e_acc[t] -= c
        out = assemble(k, pp if pp else [Q0] * HS.dim(k), e_acc)
        return [(t, c) for t, c in enumerate(out) if c], True

    unit = assemble(0, list(HS.unit), [])
    HX = CDGA(space, {}, Product(fn=cone_mul), unit, name="H(cone~)")
    HX.rank_only = False

    # volume on H^6(X̃) = e·H^4(S): ∫(e·α) = ∫_S α; ∫(π·...) = 0 (none in H^6)
    volx = tuple([Q0] * HS.dim(6)) + tuple(vol)
    HX.pairings = [
        _pairing_matrix_from_product(HX, k, 6, volx) for k in range(7)
    ]

    HD = _clone_with_pairings(HS, 4)
    j = {}
    gamma = {}
    for k in range(0, 7):
        cols = []
        for i in range(HS.dim(k)):
            col = [Q0] * HS.dim(k)
            col[i] = Q1
            cols.append(col)
        for i in range(HS.dim(k - 2)):
            ei = tuple(Q1 if t == i else Q0 for t in range(HS.dim(k - 2)))
            cols.append([-c for c in mulw(k - 2, ei)])
        if cols:
            j[k] = Matrix.from_columns(cols, HS.dim(k))
        if HS.dim(k - 2):
            gcols = []
            for i in range(HS.dim(k - 2)):
                gcols.append(assemble(k, [Q0] * HS.dim(k),
                                      [Q1 if t == i else Q0 for t in range(HS.dim(k - 2))]))
            gamma[k] = Matrix.from_columns(gcols, dims[k])
    d = OrdinaryDatum(n, HX, HD, j, gamma, sigma_count=1, link_connected=True)
    fails = validate_datum(d)
    if fails:
        raise InvariantViolation(fails)
    return d


def _volume_functional_simple(a, top):
    assert a.dim(top) == 1
    return (Q1,)


def _clone_with_pairings(a, top):
    vol = _volume_functional_simple(a, top)
    a.pairings = [_pairing_matrix_from_product(a, k, top, vol) for k in range(top + 1)]
    a.rank_only = False
    return a


# ---------------------------------------------------------------------------
# link lemma checks


class LinkConnectivityFlag:
    def __init__(self, claimed=True):
        self.claimed = bool(claimed)


class LemmaReport:
    def __init__(self):
        self.lines = []  # (statement, ok, detail)

    def add(self, statement, ok, detail=""):
        self.lines.append((statement, bool(ok), detail))

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.lines)

    def failures(self):
        return [(s, d) for s, ok, d in self.lines if not ok]

    def __str__(self):
        out = []
        for s, ok, dtl in self.lines:
            mark = "pass" if ok else "FAIL"
            out.append(f"[{mark}] {s}" + (f" ({dtl})" if dtl and not ok else ""))
        return "\n".join(out)


def check_link_lemmas(d, flag=None):
    """Rank statements of the structural link lemmas for ordinary data.

    The first block holds for every valid datum (semipurity); the second
    needs the (n-2)-connectivity of the link claimed by ``flag``.
    """
    assert d.kind == "ordinary"
    claimed = flag.claimed if flag is not None else d.link_connected
    n = d.n
    rep = LemmaReport()
    HD, HX = d.HD, d.HX
    for k in range(2, 2 * n + 1):
        js = d.j_sharp(k)
        if k <= n:
            rep.add(f"j_#^{k} injective", kernel(js).dim == 0)
        if k >= n:
            rep.add(f"j_#^{k} surjective", image(js).dim == HD.dim(k))
    if claimed:
        for s in range(1, 2 * n + 1):
            if s in (n - 1, n + 1, 2 * n):
                continue
            js = d.j_sharp(s)
            iso = kernel(js).dim == 0 and image(js).dim == HD.dim(s)
            rep.add(f"j_#^{s} isomorphism", iso, f"s={s}")
        for s in range(2, 2 * n + 1):
            if s in (n + 1, 2 * n):
                continue
            rep.add(f"gamma^{s} injective", kernel(d.gamma_map(s)).dim == 0, f"s={s}")
        for s in range(1, 2 * n + 1):
            if s in (0, n - 1):
                continue
            rep.add(
                f"j^{s} surjective", image(d.j_map(s)).dim == HD.dim(s), f"s={s}"
            )
        # Lemma 4.4-style decompositions
        for s in range(1, 2 * n):
            if s in (n - 1, n + 1):
                continue
            kj = kernel(d.j_map(s))
            ig = image(d.gamma_map(s))
            ok = kj.intersect(ig).dim == 0 and kj.dim + ig.dim == HX.dim(s)
            rep.add(f"H^{s}(X~) = Ker(j^{s}) ⊕ Im(gamma^{s})", ok, f"s={s}")
        kj = kernel(d.j_map(n - 1))
        ig = image(d.gamma_map(n - 1))
        rep.add(
            f"Ker(j^{n-1}) ∩ Im(gamma^{n-1}) = 0", kj.intersect(ig).dim == 0
        )
        kj1 = kernel(d.j_map(n + 1))
        ig1 = image(d.gamma_map(n + 1))
        quot_dim = kj1.dim - kj1.intersect(ig1).dim
        cok_dim = HX.dim(n + 1) - ig1.dim
        rep.add(
            f"Ker(j^{n+1})/(Ker ∩ Im gamma^{n+1}) ≅ Coker(gamma^{n+1})",
            quot_dim == cok_dim,
        )
    return rep
