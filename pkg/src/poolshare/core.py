"""Domain types and payout computation for compensation-based risk sharing.

A scheme pools the time-0 investments of ``n`` participants plus one
administrator (agent ``n+1``, the last index everywhere). At time 1 the fund
is split according to a realized relative-share vector ``P``:

* **Active** administrator: every agent, administrator included, receives
  ``W_i = (sum of all investments) * P_i``. If no participant claims, the
  administrator takes the whole fund.
* **Passive** administrator: the administrator invests nothing and receives
  nothing; each participant receives
  ``W_i = (participants' total) * P_i + pi_i * P_admin``, i.e. when no
  participant claims everyone is refunded their own investment.

Valid share vectors live in the set enforced by :func:`validate_shares`:
non-negative entries summing to 1, with the administrator share equal to 1
exactly when all participant shares vanish and 0 otherwise ("mutual
exclusivity").

All values are immutable after construction and every operation is a pure
function of its inputs, so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatchError,
    ExclusivityError,
    ModeMismatchError,
    NegativeShareError,
    NonPositiveScaleError,
    ShareSumError,
    ValidationError,
)

#: Absolute tolerance for the shares-sum-to-one check.
SHARE_SUM_TOL = 1e-12

#: A participant share below this threshold counts as exactly zero for the
#: exclusivity check. Built-in rules produce exact zeros; the tolerance only
#: guards float noise in custom rules.
ZERO_SHARE_TOL = 1e-15

#: Relative tolerance for the full-allocation audit on payouts.
ALLOCATION_REL_TOL = 1e-12


class Mode(Enum):
    """Administrator mode of a scheme."""

    ACTIVE = "active"
    PASSIVE = "passive"


def _as_float_tuple(values: Iterable[float], what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    for v in out:
        if not math.isfinite(v):
            raise ValidationError(f"{what} must be finite, got {v!r}")
    return out


@dataclass(frozen=True)
class InvestmentVector:
    """Time-0 investments of the ``n`` participants and the administrator.

    Args:
        amounts: ``n+1`` non-negative amounts; the last entry belongs to the
            administrator.
        mode: administrator mode. Passive schemes must have a zero
            administrator investment.

    Raises:
        DimensionMismatchError: fewer than two entries.
        ValidationError: negative or non-finite amounts, or no participant
            invests a positive amount (the scheme's standing assumption).
        ModeMismatchError: passive mode with a nonzero administrator amount.
    """

    amounts: tuple[float, ...]
    mode: Mode = Mode.ACTIVE

    def __post_init__(self) -> None:
        amounts = _as_float_tuple(self.amounts, "investment amounts")
        object.__setattr__(self, "amounts", amounts)
        if len(amounts) < 2:
            raise DimensionMismatchError(
                f"need at least one participant plus an administrator, got {len(amounts)} entries"
            )
        if any(a < 0.0 for a in amounts):
            raise ValidationError(f"investments must be non-negative, got {amounts}")
        if not any(a > 0.0 for a in amounts[:-1]):
            raise ValidationError("at least one participant investment must be positive")
        if self.mode is Mode.PASSIVE and amounts[-1] != 0.0:
            raise ModeMismatchError(
                f"passive administrator cannot invest, got {amounts[-1]}"
            )

    @property
    def n(self) -> int:
        """Number of participants (administrator excluded)."""
        return len(self.amounts) - 1

    @property
    def participants(self) -> tuple[float, ...]:
        return self.amounts[:-1]

    @property
    def admin(self) -> float:
        return self.amounts[-1]

    @property
    def total(self) -> float:
        """Time-1 fund value for an active scheme: sum of all investments."""
        return math.fsum(self.amounts)

    @property
    def participant_total(self) -> float:
        return math.fsum(self.amounts[:-1])

    def scaled(self, c: float) -> "InvestmentVector":
        """Return a copy with every amount multiplied by ``c > 0``."""
        return scale_investments(self, c)


@dataclass(frozen=True)
class RelativeShareVector:
    """A realization of the relative-compensation vector.

    Construction validates all three membership conditions; prefer the
    :func:`validate_shares` entry point for raw data.
    """

    shares: tuple[float, ...]

    def __post_init__(self) -> None:
        shares = _as_float_tuple(self.shares, "shares")
        object.__setattr__(self, "shares", shares)
        if len(shares) < 2:
            raise DimensionMismatchError(
                f"need at least one participant plus an administrator, got {len(shares)} entries"
            )
        negative = [s for s in shares if s < 0.0]
        if negative:
            raise NegativeShareError(f"shares must be non-negative, got {negative}")
        admin = shares[-1]
        # With every participant share zero, the admin share is forced to 1;
        # diagnose that before the generic sum check so the cause is named.
        if all(s < ZERO_SHARE_TOL for s in shares[:-1]):
            if abs(admin - 1.0) > SHARE_SUM_TOL:
                raise ExclusivityError(
                    "all participant shares are zero, administrator share must be 1, "
                    f"got {admin!r}"
                )
        total = math.fsum(shares)
        if abs(total - 1.0) > SHARE_SUM_TOL:
            raise ShareSumError(f"shares sum to {total!r}, expected 1")
        if any(s >= ZERO_SHARE_TOL for s in shares[:-1]) and admin >= ZERO_SHARE_TOL:
            raise ExclusivityError(
                "a participant share is positive, administrator share must be 0, "
                f"got {admin!r}"
            )

    @property
    def n(self) -> int:
        return len(self.shares) - 1

    @property
    def participant_shares(self) -> tuple[float, ...]:
        return self.shares[:-1]

    @property
    def admin_share(self) -> float:
        return self.shares[-1]


@dataclass(frozen=True)
class CompensationVector:
    """Time-1 payouts of the ``n+1`` agents, produced by the payout functions."""

    payouts: tuple[float, ...]
    mode: Mode

    def __post_init__(self) -> None:
        object.__setattr__(self, "payouts", _as_float_tuple(self.payouts, "payouts"))

    @property
    def n(self) -> int:
        return len(self.payouts) - 1

    @property
    def admin(self) -> float:
        return self.payouts[-1]

    @property
    def total(self) -> float:
        return math.fsum(self.payouts)


def validate_shares(shares: Sequence[float]) -> RelativeShareVector:
    """Validate a raw list of ``n+1`` shares and wrap it.

    Checks, in order: non-negativity, sum equals 1 (within ``SHARE_SUM_TOL``),
    and the exclusivity structure of the administrator share.

    Raises:
        NegativeShareError, ShareSumError, ExclusivityError,
        DimensionMismatchError.
    """
    return RelativeShareVector(tuple(shares))


def _check_lengths(inv: InvestmentVector, p: RelativeShareVector) -> None:
    if len(inv.amounts) != len(p.shares):
        raise DimensionMismatchError(
            f"investments have {len(inv.amounts)} entries, shares have {len(p.shares)}"
        )


def payouts_active(inv: InvestmentVector, p: RelativeShareVector) -> CompensationVector:
    """Payouts of an active-administrator scheme: ``W_i = total * P_i``.

    The full allocation condition holds by construction: the payouts sum to
    the fund value ``inv.total`` (to within float rounding of the share sum).

    Raises:
        ModeMismatchError: ``inv`` is not in active mode.
        DimensionMismatchError: length mismatch.
    """
    if inv.mode is not Mode.ACTIVE:
        raise ModeMismatchError("payouts_active requires an active-mode investment vector")
    _check_lengths(inv, p)
    total = inv.total
    return CompensationVector(tuple(total * s for s in p.shares), Mode.ACTIVE)


def payouts_passive(inv: InvestmentVector, p: RelativeShareVector) -> CompensationVector:
    """Payouts of a passive-administrator scheme.

    Each participant receives ``W_i = participant_total * P_i + pi_i * P_admin``
    and the administrator receives zero. When no participant claims
    (``P_admin = 1``) every participant is refunded their own investment, so
    the participants' payouts always sum to their total investment.

    Raises:
        ModeMismatchError: ``inv`` is not in passive mode.
        DimensionMismatchError: length mismatch.
    """
    if inv.mode is not Mode.PASSIVE:
        raise ModeMismatchError("payouts_passive requires a passive-mode investment vector")
    _check_lengths(inv, p)
    pooled = inv.participant_total
    admin_share = p.admin_share
    payouts = [pooled * s + a * admin_share for a, s in zip(inv.participants, p.participant_shares)]
    payouts.append(0.0)
    return CompensationVector(tuple(payouts), Mode.PASSIVE)


def scale_investments(inv: InvestmentVector, c: float) -> InvestmentVector:
    """Multiply every investment by ``c > 0``, keeping the mode.

    Raises:
        NonPositiveScaleError: ``c <= 0`` or non-finite.
    """
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise NonPositiveScaleError(f"scale factor must be positive, got {c!r}")
    return InvestmentVector(tuple(a * c for a in inv.amounts), inv.mode)
