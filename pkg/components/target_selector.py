"""
Selector del álgebra objetivo de un comando.

Acepta las formas

    T M
    L M f SPEC_FILE
    full-rank M
    diagonal M --a a12 a23 ...
    L41 [--a12 --a23 --a34 --l1 --l2 --l3]
    L42 [--a12 --a23 --a34 --b12 --b23 --b34 --l2 --sigma]
    <familia> [parámetros]      p. ej. l41-log --a23 2 --l2 -1
"""
import argparse
import inspect
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Callable, Optional

from utils.algebra_io import load_char_spec
from utils.errors import AlgebraFormatError, ConditionViolated
from utils.invariant_catalog import (
    Family,
    FAMILY_BUILDERS,
    l41_log,
    l41_polynomial,
    l41_power,
    l42_invariants,
    nilpotent_invariants,
    prop1_invariants,
    prop2_invariants,
)
from utils.lie_algebras import build_diagonal_L, build_L, build_L41, build_L42, build_L_full_rank, build_T

logger = logging.getLogger(__name__)

PARAMETER_FLAGS = ('a12', 'a23', 'a34', 'b12', 'b23', 'b34', 'l1', 'l2', 'l3', 'sigma')


def rational_arg(text):
    """Tipo argparse para racionales exactos 'p/q'"""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} no es un racional p/q") from None


@dataclass
class Target:
    label: str
    algebra: object
    entry_factory: Optional[Callable] = None

    def entry(self):
        """Entrada de catálogo asociada; ConditionViolated si no hay ninguna"""
        if self.entry_factory is None:
            raise ConditionViolated("catalog", f"{self.label} no corresponde a ninguna familia catalogada")
        return self.entry_factory()


class TargetSelector:
    def __init__(self, settings):
        self.settings = settings

    @staticmethod
    def add_arguments(parser, required=True):
        parser.add_argument('target', nargs='+' if required else '*',
                            help="T M | L M f SPEC_FILE | full-rank M | diagonal M | L41 | L42 | familia")
        for name in PARAMETER_FLAGS:
            parser.add_argument(f'--{name}', type=rational_arg, default=None)
        parser.add_argument('--a', dest='a_vector', type=rational_arg, nargs='+', default=None,
                            help="entradas libres a_{i(i+1)} de L(M,1) diagonal")

    def resolve(self, args):
        tokens = list(args.target)
        kind = tokens[0]
        params = {name: getattr(args, name) for name in PARAMETER_FLAGS if getattr(args, name) is not None}
        if kind in ('T', 'nilpotent'):
            M = self._size(tokens, 1)
            return Target(f"T({M})", build_T(M, self.settings), partial(nilpotent_invariants, M))
        if kind == 'L':
            return self._custom(tokens)
        if kind == 'full-rank':
            M = self._size(tokens, 1)
            return Target(f"L({M},{M - 1})", build_L_full_rank(M, self.settings), partial(prop1_invariants, M))
        if kind in ('diagonal', Family.DIAGONAL_RESONANT.value, Family.DIAGONAL_GENERIC.value):
            M = self._size(tokens, 1)
            a = args.a_vector
            if a is None:
                raise ValueError("diagonal necesita --a con M-1 valores")
            return Target(f"L({M},1)", build_diagonal_L(M, a, self.settings), partial(prop2_invariants, M, a))
        if kind == 'L41':
            return self._l41(params)
        if kind == 'L42':
            return self._l42(params)
        try:
            family = Family(kind)
        except ValueError:
            raise ValueError(f"selector desconocido {kind!r}") from None
        builder = FAMILY_BUILDERS.get(family)
        if builder is None:
            raise ValueError(f"la familia {kind} necesita el tamaño: use T, full-rank o diagonal")
        if family is Family.L42_POWER:
            return self._l42(params)
        accepted = inspect.signature(builder).parameters
        unknown = sorted(set(params) - set(accepted))
        if unknown:
            raise ValueError(f"la familia {kind} no admite {', '.join('--' + name for name in unknown)}")
        entry = builder(**params)
        return Target(entry.algebra.name, entry.algebra, lambda: entry)

    @staticmethod
    def _size(tokens, position):
        if len(tokens) <= position:
            raise ValueError(f"falta M tras {tokens[0]}")
        try:
            return int(tokens[position])
        except ValueError:
            raise ValueError(f"M debe ser un entero, se recibió {tokens[position]!r}") from None

    def _custom(self, tokens):
        if len(tokens) != 4:
            raise ValueError("uso: L M f SPEC_FILE")
        M, f = self._size(tokens, 1), self._size(tokens, 2)
        spec = load_char_spec(tokens[3], M)
        if spec.f != f:
            raise AlgebraFormatError(f"el fichero define {spec.f} matrices características pero f={f}")
        return Target(f"L({M},{f})", build_L(M, spec, self.settings))

    def _l41(self, params):
        a12 = params.get('a12', Fraction(1))
        a23 = params.get('a23', Fraction(0))
        a34 = params.get('a34', Fraction(-1))
        l1, l2, l3 = (params.get(name, Fraction(0)) for name in ('l1', 'l2', 'l3'))
        alg = build_L41(a12, a23, a34, l1, l2, l3, self.settings)
        if l2 != 0:
            factory = partial(l41_log, a23, a12, l2)
        elif a12 + a23 + a34 == 0 and a23 == 0:
            factory = partial(l41_polynomial, a12)
        else:
            factory = partial(l41_power, a12, a23, a34, l1, l3)
        return Target(alg.name, alg, factory)

    def _l42(self, params):
        a = tuple(params.get(name, default) for name, default in (('a12', 1), ('a23', 0), ('a34', -1)))
        b = tuple(params.get(name, default) for name, default in (('b12', 0), ('b23', 1), ('b34', 0)))
        l2 = params.get('l2', Fraction(0))
        sigma = params.get('sigma', Fraction(0))
        alg = build_L42(a, b, (params.get('l1', 0), l2, params.get('l3', 0)), sigma, self.settings)
        return Target(alg.name, alg, partial(l42_invariants, a, b, l2, sigma))
