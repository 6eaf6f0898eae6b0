"""Trivialized Lie algebroids over a polynomial chart.

Everything is expressed in global frames: a section is a vector of
polynomials, the anchor is a ``dim x rank`` polynomial matrix whose column i
is the vector field of the i-th frame element, and the bracket is the
Leibniz extension of the structure functions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import _linalg
from .errors import InputError
from .exactpoly import Polynomial, Scalar, as_rational
from .report import Check, Report, run_check, verdict


@dataclass(frozen=True)
class Chart:
    dim: int = 0
    var_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.dim < 0:
            raise InputError("chart dimension must be non-negative")
        names = tuple(self.var_names) or tuple(f"x{u + 1}" for u in range(self.dim))
        if len(names) != self.dim:
            raise InputError(f"chart has dim {self.dim} but {len(names)} variable names")
        if len(set(names)) != len(names):
            raise InputError("chart variable names must be distinct")
        object.__setattr__(self, "var_names", names)

    def var(self, name_or_index) -> Polynomial:
        idx = self.var_names.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return Polynomial.variable(idx, self.dim)

    def const(self, c: Scalar) -> Polynomial:
        return Polynomial.constant(c, self.dim)

    def default_samples(self) -> list[tuple[Fraction, ...]]:
        """Origin plus the unit points."""
        origin = tuple(Fraction(0) for _ in range(self.dim))
        units = [tuple(Fraction(int(u == v)) for v in range(self.dim)) for u in range(self.dim)]
        return [origin] + units


POINT = Chart(0, ())


def _poly(value, dim: int) -> Polynomial:
    if isinstance(value, Polynomial):
        if value.dim != dim:
            raise InputError(f"chart dimension mismatch: {value.dim} vs {dim}")
        return value
    return Polynomial.constant(as_rational(value), dim)


class Section:
    """A section of a trivialized bundle: one polynomial per frame element."""

    __slots__ = ("comps", "dim")

    def __init__(self, comps: Iterable, dim: int):
        self.dim = dim
        self.comps = tuple(_poly(c, dim) for c in comps)

    @classmethod
    def zero(cls, rank: int, dim: int) -> "Section":
        z = Polynomial.zero(dim)
        return cls._raw((z,) * rank, dim)

    @classmethod
    def basis(cls, rank: int, i: int, dim: int) -> "Section":
        if not 0 <= i < rank:
            raise InputError(f"basis index {i} out of range for rank {rank}")
        z, one = Polynomial.zero(dim), Polynomial.one(dim)
        return cls._raw(tuple(one if k == i else z for k in range(rank)), dim)

    @classmethod
    def _raw(cls, comps: tuple, dim: int) -> "Section":
        s = object.__new__(cls)
        s.comps = comps
        s.dim = dim
        return s

    @property
    def rank(self) -> int:
        return len(self.comps)

    def _check(self, other: "Section") -> None:
        if not isinstance(other, Section):
            raise InputError(f"expected a Section, got {type(other).__name__}")
        if other.rank != self.rank or other.dim != self.dim:
            raise InputError(f"section shape mismatch: rank {self.rank}/{other.rank}, dim {self.dim}/{other.dim}")

    def __add__(self, other: "Section") -> "Section":
        self._check(other)
        return Section._raw(tuple(a + b for a, b in zip(self.comps, other.comps)), self.dim)

    def __sub__(self, other: "Section") -> "Section":
        self._check(other)
        return Section._raw(tuple(a - b for a, b in zip(self.comps, other.comps)), self.dim)

    def __neg__(self) -> "Section":
        return Section._raw(tuple(-a for a in self.comps), self.dim)

    def times(self, f) -> "Section":
        """Multiply by a function or a rational."""
        if isinstance(f, Polynomial):
            if f.dim != self.dim:
                raise InputError("chart dimension mismatch")
            if f.is_zero():
                return Section.zero(self.rank, self.dim)
            return Section._raw(tuple(f * a for a in self.comps), self.dim)
        return Section._raw(tuple(a.scale(f) for a in self.comps), self.dim)

    __mul__ = times
    __rmul__ = times

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __iter__(self):
        return iter(self.comps)

    def __len__(self) -> int:
        return len(self.comps)

    def __getitem__(self, k):
        return self.comps[k]

    def __eq__(self, other) -> bool:
        return isinstance(other, Section) and self.dim == other.dim and self.comps == other.comps

    def __hash__(self) -> int:
        return hash(self.comps)

    def to_json(self) -> list:
        return [c.to_json() for c in self.comps]

    def format(self, basis: Sequence[str] | None = None, var_names: Sequence[str] | None = None) -> str:
        basis = basis or [f"e{k + 1}" for k in range(self.rank)]
        parts = []
        for c, name in zip(self.comps, basis):
            if c.is_zero():
                continue
            text = c.format(var_names)
            if c.is_constant() and c.constant_value() == 1:
                parts.append(name)
            elif len(c.terms) > 1:
                parts.append(f"({text})*{name}")
            else:
                parts.append(f"{text}*{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Section({self.format()})"


def combination(coeffs: Sequence[Polynomial], vectors: Sequence[Section], rank: int, dim: int) -> Section:
    """Sum of coeffs[i] * vectors[i], skipping zero coefficients."""
    out = [Polynomial.zero(dim)] * rank
    for f, v in zip(coeffs, vectors):
        if f.is_zero():
            continue
        for k, c in enumerate(v.comps):
            if not c.is_zero():
                out[k] = out[k] + f * c
    return Section._raw(tuple(out), dim)


class Algebroid:
    """A Lie algebroid structure on the trivial bundle of rank ``rank``."""

    def __init__(
        self,
        name: str,
        chart: Chart,
        rank: int,
        anchor: Sequence[Sequence] | None = None,
        structure: Mapping[tuple[int, int], Sequence] | None = None,
        basis: Sequence[str] | None = None,
    ):
        if rank < 0:
            raise InputError("rank must be non-negative")
        self.name = name
        self.chart = chart
        self.rank = rank
        dim = chart.dim
        self.dim = dim
        self.basis_names = tuple(basis) if basis else tuple(f"e{i + 1}" for i in range(rank))
        if len(self.basis_names) != rank:
            raise InputError(f"{name}: {len(self.basis_names)} basis names for rank {rank}")
        if anchor is None:
            anchor = [[0] * rank for _ in range(dim)]
        if len(anchor) != dim or any(len(row) != rank for row in anchor):
            raise InputError(f"{name}: anchor must be a {dim} x {rank} matrix")
        self.anchor = tuple(tuple(_poly(x, dim) for x in row) for row in anchor)
        self._rho = tuple(tuple(self.anchor[u][i] for u in range(dim)) for i in range(rank))
        zero = Section.zero(rank, dim)
        table = [[zero] * rank for _ in range(rank)]
        self.structure: dict[tuple[int, int], Section] = {}
        for (i, j), value in (structure or {}).items():
            if not (0 <= i < j < rank):
                raise InputError(f"{name}: structure entries must have 0 <= i < j < rank, got ({i}, {j})")
            sec = value if isinstance(value, Section) else Section(value, dim)
            if sec.rank != rank:
                raise InputError(f"{name}: structure value for ({i}, {j}) has wrong rank")
            if sec.is_zero():
                continue
            self.structure[(i, j)] = sec
            table[i][j] = sec
            table[j][i] = -sec
        self._table = tuple(tuple(row) for row in table)

    def __repr__(self) -> str:
        return f"Algebroid({self.name!r}, rank={self.rank}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        """Structural equality: rank, anchor and brackets (names are ignored)."""
        return (isinstance(other, Algebroid) and self.rank == other.rank and self.dim == other.dim
                and self.anchor == other.anchor and self.structure == other.structure)

    def __hash__(self) -> int:
        return hash((self.rank, self.dim, self.anchor))

    def basis(self, i: int) -> Section:
        return Section.basis(self.rank, i, self.dim)

    def frame(self) -> list[Section]:
        return [self.basis(i) for i in range(self.rank)]

    def zero_section(self) -> Section:
        return Section.zero(self.rank, self.dim)

    def section(self, comps: Iterable) -> Section:
        s = Section(comps, self.dim)
        if s.rank != self.rank:
            raise InputError(f"{self.name}: section of rank {s.rank}, expected {self.rank}")
        return s

    def label(self, i: int) -> str:
        return self.basis_names[i]

    def struct(self, i: int, j: int) -> Section:
        return self._table[i][j]

    def _check_section(self, X: Section) -> None:
        if not isinstance(X, Section) or X.rank != self.rank or X.dim != self.dim:
            raise InputError(f"not a section of {self.name}")

    def derive(self, i: int, f: Polynomial) -> Polynomial:
        """rho(e_i) applied to f."""
        out = Polynomial.zero(self.dim)
        for u, r in enumerate(self._rho[i]):
            if not r.is_zero():
                d = f.partial(u)
                if not d.is_zero():
                    out = out + r * d
        return out

    def anchor_field(self, X: Section) -> tuple[Polynomial, ...]:
        self._check_section(X)
        return tuple(
            sum((X[i] * self._rho[i][u] for i in range(self.rank)), Polynomial.zero(self.dim))
            for u in range(self.dim)
        )

    def anchor_apply(self, X: Section, f: Polynomial) -> Polynomial:
        self._check_section(X)
        f = _poly(f, self.dim)
        if self.dim == 0:
            return Polynomial.zero(0)
        out = Polynomial.zero(self.dim)
        for i, x in enumerate(X.comps):
            if not x.is_zero():
                d = self.derive(i, f)
                if not d.is_zero():
                    out = out + x * d
        return out

    def bracket(self, X: Section, Y: Section) -> Section:
        self._check_section(X)
        self._check_section(Y)
        n, dim = self.rank, self.dim
        out = [Polynomial.zero(dim)] * n
        nzx = [(i, x) for i, x in enumerate(X.comps) if not x.is_zero()]
        nzy = [(j, y) for j, y in enumerate(Y.comps) if not y.is_zero()]
        for i, x in nzx:
            for j, y in nzy:
                f = self._table[i][j]
                if i == j or f.is_zero():
                    continue
                xy = x * y
                for k, c in enumerate(f.comps):
                    if not c.is_zero():
                        out[k] = out[k] + xy * c
        if dim:
            for k in range(n):
                acc = out[k]
                for i, x in nzx:
                    acc = acc + x * self.derive(i, Y[k])
                for j, y in nzy:
                    acc = acc - y * self.derive(j, X[k])
                out[k] = acc
        return Section._raw(tuple(out), dim)


def vector_field_bracket(V: Sequence[Polynomial], W: Sequence[Polynomial]) -> tuple[Polynomial, ...]:
    dim = len(V)
    out = []
    for u in range(dim):
        acc = Polynomial.zero(dim)
        for v in range(dim):
            if not V[v].is_zero():
                acc = acc + V[v] * W[u].partial(v)
            if not W[v].is_zero():
                acc = acc - W[v] * V[u].partial(v)
        out.append(acc)
    return tuple(out)


def bracket(alg: Algebroid, X: Section, Y: Section) -> Section:
    return alg.bracket(X, Y)


def anchor_apply(alg: Algebroid, X: Section, f: Polynomial) -> Polynomial:
    return alg.anchor_apply(X, f)


def jacobiator(alg: Algebroid, X: Section, Y: Section, Z: Section) -> Section:
    b = alg.bracket
    return b(b(X, Y), Z) + b(b(Y, Z), X) + b(b(Z, X), Y)


def validate_algebroid(alg: Algebroid) -> Report:
    report = Report()
    fr = alg.frame()
    lab = alg.label

    def fmt(v: Section) -> str:
        return v.format(alg.basis_names, alg.chart.var_names)

    report.add(run_check(
        "algebroid.antisymmetry", "Lie bracket",
        (((lab(i), lab(j)), lambda i=i, j=j: alg.bracket(fr[i], fr[j]) + alg.bracket(fr[j], fr[i]))
         for i in range(alg.rank) for j in range(i, alg.rank)),
        fmt,
    ))
    report.add(run_check(
        "algebroid.jacobi", "Jacobi",
        (((lab(i), lab(j), lab(k)), lambda i=i, j=j, k=k: jacobiator(alg, fr[i], fr[j], fr[k]))
         for i, j, k in itertools.combinations(range(alg.rank), 3)),
        fmt,
    ))

    def anchor_defect(i: int, j: int):
        lhs = alg.anchor_field(alg.bracket(fr[i], fr[j]))
        rhs = vector_field_bracket(alg.anchor_field(fr[i]), alg.anchor_field(fr[j]))
        return Section(tuple(a - b for a, b in zip(lhs, rhs)), alg.dim)

    report.add(run_check(
        "algebroid.anchor", "anchor",
        (((lab(i), lab(j)), lambda i=i, j=j: anchor_defect(i, j))
         for i, j in itertools.combinations(range(alg.rank), 2)),
    ))
    return report


class BundleMap:
    """A base-preserving vector bundle map, as a ``target x source`` matrix."""

    def __init__(self, matrix: Sequence[Sequence], source_rank: int, target_rank: int, dim: int, name: str = ""):
        if len(matrix) != target_rank or any(len(row) != source_rank for row in matrix):
            raise InputError(f"bundle map {name!r}: matrix must be {target_rank} x {source_rank}")
        self.matrix = tuple(tuple(_poly(x, dim) for x in row) for row in matrix)
        self.source_rank = source_rank
        self.target_rank = target_rank
        self.dim = dim
        self.name = name
        self._cols = tuple(
            Section._raw(tuple(self.matrix[k][j] for k in range(target_rank)), dim) for j in range(source_rank)
        )

    @classmethod
    def identity(cls, n: int, dim: int, name: str = "id") -> "BundleMap":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n, dim, name)

    @classmethod
    def zero(cls, source_rank: int, target_rank: int, dim: int, name: str = "0") -> "BundleMap":
        return cls([[0] * source_rank for _ in range(target_rank)], source_rank, target_rank, dim, name)

    @classmethod
    def from_columns(cls, cols: Sequence[Section], target_rank: int, dim: int, name: str = "") -> "BundleMap":
        for c in cols:
            if c.rank != target_rank:
                raise InputError("column has wrong rank")
        return cls([[c[k] for c in cols] for k in range(target_rank)], len(cols), target_rank, dim, name)

    def column(self, j: int) -> Section:
        return self._cols[j]

    def apply(self, X: Section) -> Section:
        if X.rank != self.source_rank or X.dim != self.dim:
            raise InputError(f"bundle map {self.name!r} applied to a section of rank {X.rank}")
        return combination(X.comps, self._cols, self.target_rank, self.dim)

    __call__ = apply

    def compose(self, other: "BundleMap") -> "BundleMap":
        """self after other."""
        if other.target_rank != self.source_rank:
            raise InputError("bundle map composition rank mismatch")
        cols = [self.apply(other.column(j)) for j in range(other.source_rank)]
        return BundleMap.from_columns(cols, self.target_rank, self.dim, f"{self.name}*{other.name}")

    def __add__(self, other: "BundleMap") -> "BundleMap":
        self._same_shape(other)
        return BundleMap([[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
                         self.source_rank, self.target_rank, self.dim)

    def __sub__(self, other: "BundleMap") -> "BundleMap":
        self._same_shape(other)
        return BundleMap([[a - b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
                         self.source_rank, self.target_rank, self.dim)

    def __neg__(self) -> "BundleMap":
        return BundleMap([[-a for a in r] for r in self.matrix], self.source_rank, self.target_rank, self.dim)

    def times(self, f) -> "BundleMap":
        return BundleMap([[a * f for a in r] for r in self.matrix], self.source_rank, self.target_rank, self.dim)

    def transpose(self) -> "BundleMap":
        return BundleMap([[self.matrix[k][j] for k in range(self.target_rank)] for j in range(self.source_rank)],
                         self.target_rank, self.source_rank, self.dim)

    def _same_shape(self, other: "BundleMap") -> None:
        if (self.source_rank, self.target_rank, self.dim) != (other.source_rank, other.target_rank, other.dim):
            raise InputError("bundle map shape mismatch")

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.matrix for x in row)

    def is_constant(self) -> bool:
        return all(x.is_constant() for row in self.matrix for x in row)

    def evaluate(self, point: Sequence) -> list[list[Fraction]]:
        return [[x.evaluate(point) for x in row] for row in self.matrix]

    def constant_matrix(self) -> list[list[Fraction]]:
        return [[x.constant_value() for x in row] for row in self.matrix]

    def __eq__(self, other) -> bool:
        return (isinstance(other, BundleMap) and self.source_rank == other.source_rank
                and self.target_rank == other.target_rank and self.matrix == other.matrix)

    def __hash__(self) -> int:
        return hash(self.matrix)

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.matrix]

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(x.format() for x in row) for row in self.matrix)
        return f"BundleMap({self.name!r}, {self.target_rank}x{self.source_rank}, [{rows}])"


def validate_algebroid_morphism(phi: BundleMap, src: Algebroid, dst: Algebroid) -> Report:
    if phi.source_rank != src.rank or phi.target_rank != dst.rank or phi.dim != src.dim or src.dim != dst.dim:
        raise InputError(f"morphism {phi.name!r} does not match {src.name} -> {dst.name}")
    report = Report()
    fr = src.frame()

    def anchor_defect(i: int):
        lhs = dst.anchor_field(phi.apply(fr[i]))
        rhs = src.anchor_field(fr[i])
        return Section(tuple(a - b for a, b in zip(lhs, rhs)), src.dim)

    report.add(run_check(
        "morphism.anchor", "df:cd",
        (((src.label(i),), lambda i=i: anchor_defect(i)) for i in range(src.rank)),
    ))
    report.add(run_check(
        "morphism.bracket", "df:cd",
        (((src.label(i), src.label(j)),
          lambda i=i, j=j: phi.apply(src.bracket(fr[i], fr[j])) - dst.bracket(phi.apply(fr[i]), phi.apply(fr[j])))
         for i, j in itertools.combinations(range(src.rank), 2)),
    ))
    return report


class Connection:
    """An A-connection on the trivial bundle E of rank ``module_rank``.

    ``christoffel[i][j][k]`` is the coefficient of e_k in the covariant
    derivative of e_j along a_i.
    """

    def __init__(self, acting: Algebroid, module_rank: int, christoffel: Sequence | None = None):
        self.acting = acting
        self.module_rank = module_rank
        dim = acting.dim
        if christoffel is None:
            christoffel = [[[0] * module_rank for _ in range(module_rank)] for _ in range(acting.rank)]
        if len(christoffel) != acting.rank or any(
            len(row) != module_rank or any(len(col) != module_rank for col in row) for row in christoffel
        ):
            raise InputError(
                f"connection Christoffel data must be {acting.rank} x {module_rank} x {module_rank}"
            )
        self._cols = tuple(
            tuple(Section(christoffel[i][j], dim) for j in range(module_rank)) for i in range(acting.rank)
        )

    @classmethod
    def zero(cls, acting: Algebroid, module_rank: int) -> "Connection":
        return cls(acting, module_rank)

    @classmethod
    def from_operator(cls, acting: Algebroid, module_rank: int, op) -> "Connection":
        """Read off Christoffel data from ``op(i, j)``, the derivative of e_j along a_i."""
        data = []
        for i in range(acting.rank):
            row = []
            for j in range(module_rank):
                v = op(i, j)
                if v.rank != module_rank:
                    raise InputError("operator returned a section of the wrong rank")
                row.append(list(v.comps))
            data.append(row)
        return cls(acting, module_rank, data)

    @property
    def christoffel(self) -> list[list[list[Polynomial]]]:
        return [[list(col.comps) for col in row] for row in self._cols]

    def gamma(self, i: int, j: int) -> Section:
        return self._cols[i][j]

    def on_basis(self, i: int, e: Section) -> Section:
        """Covariant derivative of e along the frame element a_i."""
        if e.rank != self.module_rank:
            raise InputError("section has wrong rank for this connection")
        alg = self.acting
        out = combination(e.comps, self._cols[i], self.module_rank, alg.dim)
        if alg.dim:
            out = out + Section._raw(tuple(alg.derive(i, c) for c in e.comps), alg.dim)
        return out

    def apply(self, X: Section, e: Section) -> Section:
        self.acting._check_section(X)
        out = Section.zero(self.module_rank, self.acting.dim)
        for i, x in enumerate(X.comps):
            if not x.is_zero():
                out = out + self.on_basis(i, e).times(x)
        return out

    __call__ = apply

    def __eq__(self, other) -> bool:
        return (isinstance(other, Connection) and self.module_rank == other.module_rank
                and self.acting.rank == other.acting.rank and self._cols == other._cols)

    def __hash__(self) -> int:
        return hash(self._cols)

    def to_json(self) -> list:
        return [[col.to_json() for col in row] for row in self._cols]

    def pullback(self, phi: BundleMap, src: Algebroid) -> "Connection":
        """The connection e -> nabla_{phi(a)} e for a in src."""
        return Connection.from_operator(
            src, self.module_rank, lambda i, j: self.apply(phi.column(i), Section.basis(self.module_rank, j, src.dim))
        )


def connection_apply(nabla: Connection, X: Section, e: Section) -> Section:
    return nabla.apply(X, e)


class HomValuedForm:
    """A form on A of degree p with values in Hom(S, T).

    Values are stored on strictly increasing index tuples as bundle maps
    S -> T; missing entries are zero.
    """

    def __init__(self, acting: Algebroid, degree: int, source_rank: int, target_rank: int,
                 values: Mapping[tuple[int, ...], BundleMap] | None = None):
        self.acting = acting
        self.degree = degree
        self.source_rank = source_rank
        self.target_rank = target_rank
        self.values: dict[tuple[int, ...], BundleMap] = {}
        for idx, m in (values or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < acting.rank for i in idx):
                raise InputError(f"form index {idx} invalid for degree {degree}")
            if not isinstance(m, BundleMap):
                m = BundleMap(m, source_rank, target_rank, acting.dim)
            if m.source_rank != source_rank or m.target_rank != target_rank:
                raise InputError("form value has wrong shape")
            sign, key = _sort_sign(idx)
            if sign == 0:
                if not m.is_zero():
                    raise InputError(f"form value on repeated index {idx} must vanish")
                continue
            if sign < 0:
                m = -m
            if key in self.values:
                if self.values[key] != m:
                    raise InputError(f"inconsistent antisymmetric values for {key}")
                continue
            if not m.is_zero():
                self.values[key] = m

    @classmethod
    def zero(cls, acting: Algebroid, degree: int, source_rank: int, target_rank: int) -> "HomValuedForm":
        return cls(acting, degree, source_rank, target_rank)

    @classmethod
    def from_function(cls, acting: Algebroid, degree: int, source_rank: int, target_rank: int, fn) -> "HomValuedForm":
        """Build from ``fn(idx)`` evaluated on increasing index tuples."""
        vals = {idx: fn(idx) for idx in itertools.combinations(range(acting.rank), degree)}
        return cls(acting, degree, source_rank, target_rank, vals)

    def _zero_map(self) -> BundleMap:
        return BundleMap.zero(self.source_rank, self.target_rank, self.acting.dim)

    def value(self, idx: Sequence[int]) -> BundleMap:
        sign, key = _sort_sign(tuple(idx))
        if sign == 0 or key not in self.values:
            return self._zero_map()
        m = self.values[key]
        return m if sign > 0 else -m

    def evaluate(self, args: Sequence[Section]) -> BundleMap:
        if len(args) != self.degree:
            raise InputError(f"form of degree {self.degree} needs {self.degree} arguments")
        for a in args:
            self.acting._check_section(a)
        out = self._zero_map()
        nz = [[(i, c) for i, c in enumerate(a.comps) if not c.is_zero()] for a in args]
        for combo in itertools.product(*nz):
            idx = tuple(i for i, _ in combo)
            sign, key = _sort_sign(idx)
            if sign == 0 or key not in self.values:
                continue
            coeff = Polynomial.one(self.acting.dim)
            for _, c in combo:
                coeff = coeff * c
            if sign < 0:
                coeff = -coeff
            out = out + self.values[key].times(coeff)
        return out

    def apply(self, args: Sequence[Section], e: Section) -> Section:
        return self.evaluate(args).apply(e)

    def _combine(self, other: "HomValuedForm", sign: int) -> "HomValuedForm":
        self._same_type(other)
        keys = set(self.values) | set(other.values)
        vals = {}
        for k in keys:
            a = self.values.get(k, self._zero_map())
            b = other.values.get(k, self._zero_map())
            vals[k] = a + b if sign > 0 else a - b
        return HomValuedForm(self.acting, self.degree, self.source_rank, self.target_rank, vals)

    def __add__(self, other: "HomValuedForm") -> "HomValuedForm":
        return self._combine(other, 1)

    def __sub__(self, other: "HomValuedForm") -> "HomValuedForm":
        return self._combine(other, -1)

    def __neg__(self) -> "HomValuedForm":
        return HomValuedForm(self.acting, self.degree, self.source_rank, self.target_rank,
                             {k: -v for k, v in self.values.items()})

    def _same_type(self, other: "HomValuedForm") -> None:
        if (self.degree, self.source_rank, self.target_rank, self.acting.rank) != (
                other.degree, other.source_rank, other.target_rank, other.acting.rank):
            raise InputError("form type mismatch")

    def postcompose(self, m: BundleMap) -> "HomValuedForm":
        """m after each value."""
        return HomValuedForm(self.acting, self.degree, self.source_rank, m.target_rank,
                             {k: m.compose(v) for k, v in self.values.items()})

    def precompose(self, m: BundleMap) -> "HomValuedForm":
        """Each value after m."""
        return HomValuedForm(self.acting, self.degree, m.source_rank, self.target_rank,
                             {k: v.compose(m) for k, v in self.values.items()})

    def pullback(self, phi: BundleMap, src: Algebroid) -> "HomValuedForm":
        cols = [phi.column(i) for i in range(src.rank)]
        return HomValuedForm.from_function(
            src, self.degree, self.source_rank, self.target_rank,
            lambda idx: self.evaluate([cols[i] for i in idx]),
        )

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomValuedForm) and self.degree == other.degree
                and self.source_rank == other.source_rank and self.target_rank == other.target_rank
                and self.values == other.values)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.values)))

    def entries(self):
        """All increasing index tuples with their values, zeros included."""
        for idx in itertools.combinations(range(self.acting.rank), self.degree):
            yield idx, self.value(idx)

    def to_json(self) -> list:
        return [{"args": list(k), "value": self.values[k].to_json()} for k in sorted(self.values)]

    def __repr__(self) -> str:
        return (f"HomValuedForm(degree={self.degree}, {self.target_rank}x{self.source_rank}, "
                f"nonzero={sorted(self.values)})")


def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    if len(set(idx)) != len(idx):
        return 0, idx
    sign = 1
    arr = list(idx)
    for a in range(len(arr)):
        for b in range(len(arr) - 1 - a):
            if arr[b] > arr[b + 1]:
                arr[b], arr[b + 1] = arr[b + 1], arr[b]
                sign = -sign
    return sign, tuple(arr)


def hom_derivative(target: Connection, source: Connection, i: int, psi: BundleMap) -> BundleMap:
    """(nabla^Hom_{a_i} psi)(e) = nabla^T(psi e) - psi(nabla^S e) on frame elements."""
    cols = []
    for s in range(psi.source_rank):
        cols.append(target.on_basis(i, psi.column(s)) - psi.apply(source.gamma(i, s)))
    return BundleMap.from_columns(cols, psi.target_rank, psi.dim)


def koszul_d(conns: tuple[Connection, Connection], omega: HomValuedForm, alg: Algebroid | None = None) -> HomValuedForm:
    """Koszul differential of a Hom(E1, E0)-valued form.

    ``conns`` is (connection on E0, connection on E1): the target bundle
    first, as in the Hom connection nabla^{E0} o psi - psi o nabla^{E1}.
    """
    target, source = conns
    alg = alg or omega.acting
    if target.module_rank != omega.target_rank or source.module_rank != omega.source_rank:
        raise InputError("connections do not match the form's Hom bundle")
    if target.acting.rank != alg.rank or source.acting.rank != alg.rank:
        raise InputError("connections act through a different algebroid")
    p = omega.degree
    fr = alg.frame()

    def value(idx: tuple[int, ...]) -> BundleMap:
        out = omega._zero_map()
        for r, i in enumerate(idx):
            rest = idx[:r] + idx[r + 1:]
            term = hom_derivative(target, source, i, omega.value(rest))
            out = out + term if r % 2 == 0 else out - term
        for r, s in itertools.combinations(range(p + 1), 2):
            br = alg.bracket(fr[idx[r]], fr[idx[s]])
            if br.is_zero():
                continue
            rest = [fr[idx[t]] for t in range(p + 1) if t not in (r, s)]
            term = omega.evaluate([br] + rest)
            out = out + term if (r + s) % 2 == 0 else out - term
        return out

    return HomValuedForm.from_function(alg, p + 1, omega.source_rank, omega.target_rank, value)


def curvature(nabla: Connection) -> HomValuedForm:
    alg = nabla.acting
    n = nabla.module_rank
    fr = alg.frame()

    def value(idx):
        i, j = idx
        br = alg.bracket(fr[i], fr[j])
        cols = []
        for k in range(n):
            e = Section.basis(n, k, alg.dim)
            cols.append(nabla.on_basis(i, nabla.on_basis(j, e)) - nabla.on_basis(j, nabla.on_basis(i, e))
                        - nabla.apply(br, e))
        return BundleMap.from_columns(cols, n, alg.dim)

    return HomValuedForm.from_function(alg, 2, n, n, value)


def surjectivity_certificate(phi: BundleMap, samples: Sequence[Sequence] | None = None):
    """Return (surjective, kind, ranks).

    kind is "constant-matrix" when the matrix has constant entries (the
    verdict is then exact everywhere) and "sampled" otherwise.
    """
    if phi.is_constant():
        r = _linalg.rank(phi.constant_matrix(), phi.source_rank)
        return r == phi.target_rank, "constant-matrix", [r]
    if samples is None:
        samples = Chart(phi.dim).default_samples()
    ranks = [_linalg.rank(phi.evaluate(pt), phi.source_rank) for pt in samples]
    return all(r == phi.target_rank for r in ranks), "sampled", ranks


def pointwise_rank(phi: BundleMap, samples: Sequence[Sequence]) -> Report:
    """Rank of phi at each sample point; passes iff full row rank everywhere."""
    report = Report()
    ranks = [_linalg.rank(phi.evaluate(pt), phi.source_rank) for pt in samples]
    bad = next((pt for pt, r in zip(samples, ranks) if r != phi.target_rank), None)
    kind = "constant-matrix" if phi.is_constant() else "sampled"
    report.add(verdict(
        "rank.surjective", "transitive", bad is None,
        counterexample=tuple(str(x) for x in bad) if bad is not None else None,
        detail=f"{kind} certificate; ranks={ranks} target={phi.target_rank}",
    ))
    return report
