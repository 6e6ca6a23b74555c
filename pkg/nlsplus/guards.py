from typing import Iterable, Optional, Sequence

# ----------------------
# Excepciones del dominio
# ----------------------

class NLSError(Exception):
    """Error base de nlsplus"""


class DomainError(NLSError, ValueError):
    """Precondición violada (dimensión, modos negativos, p < 2, ω ≤ 0, soporte)"""


class SingularityError(NLSError):
    """Evaluación en (o a través de) la singularidad del modo cero"""

    def __init__(self, message: str, blowup_time: float):
        super().__init__(message)
        self.blowup_time = blowup_time


class DivergenceError(NLSError):
    """El integrador produjo valores no finitos"""

    def __init__(self, message: str, last_finite_time: float):
        super().__init__(message)
        self.last_finite_time = last_finite_time


class CertificationError(NLSError):
    """Fallo interno de la aritmética rigurosa (nunca un veredicto)"""


class IntervalOverflowError(CertificationError, OverflowError):
    pass


class IntervalDivisionError(CertificationError, ZeroDivisionError):
    pass


class CommandError(NLSError):
    """Error a nivel de CLI con su código de salida y detalle"""

    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


# ----------------------
# Guardas de precondición
# ----------------------

def power_required(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or p < 2:
        raise DomainError(f"El exponente p debe ser un entero ≥ 2 (recibido {p!r})")
    return p


def positive_omega_required(omega: Iterable[float]) -> tuple:
    values = tuple(float(w) for w in omega)
    if not values:
        raise DomainError("ω no puede ser vacío")
    for w in values:
        if not w > 0:
            raise DomainError(f"Las frecuencias ω deben ser positivas (recibido {w!r})")
    return values


def same_dimension_required(*dims: int) -> int:
    if len(set(dims)) > 1:
        raise DomainError(f"Dimensiones incompatibles: {sorted(set(dims))}")
    return dims[0]


def non_negative_index_required(entries: Sequence[int], d: Optional[int] = None) -> tuple:
    index = tuple(int(e) for e in entries)
    if d is not None and len(index) != d:
        raise DomainError(f"Multi-índice {index} no tiene dimensión {d}")
    if any(e < 0 for e in index):
        raise DomainError(f"Multi-índice con componentes negativas: {index}")
    return index


def positive_support_required(modes: Iterable[tuple]) -> None:
    """Todos los modos n deben cumplir n ≥ 1 componente a componente"""
    for n in modes:
        if any(k < 1 for k in n):
            raise DomainError(f"El modo {n} no cumple n ≥ 1 (modo cero o no positivo)")


def one_dimensional_required(d: int, what: str) -> None:
    if d != 1:
        raise DomainError(f"{what} solo está disponible para d = 1 (recibido d = {d})")


def truncation_required(N: int) -> int:
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise DomainError(f"El orden de truncamiento N debe ser un entero ≥ 1 (recibido {N!r})")
    return N
