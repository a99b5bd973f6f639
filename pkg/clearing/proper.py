"""Keep only payment flow that originates from positive external assets."""
from __future__ import annotations

import logging
from collections import deque
from typing import Set

from clearing.result import PaymentMatrix
from network.model import FinancialNetwork

log = logging.getLogger(__name__)


def reached_firms(payments: PaymentMatrix, net: FinancialNetwork) -> Set[int]:
    """Breadth-first marking from firms with e_i > 0 along edges with x_ij > 0."""
    marked = {i for i, e in enumerate(net.externals) if e > 0}
    queue = deque(sorted(marked))
    while queue:
        i = queue.popleft()
        for j in range(payments.n):
            if j not in marked and payments.p[i, j] > 0:
                marked.add(j)
                queue.append(j)
    return marked


def proper_filter(payments: PaymentMatrix, net: FinancialNetwork) -> PaymentMatrix:
    """Zero every outgoing payment of firms the marking never reaches."""
    marked = reached_firms(payments, net)
    unreached = [i for i in range(payments.n) if i not in marked and any(v > 0 for v in payments.p[i])]
    if not unreached:
        return payments
    log.debug("proper filter drops circulation out of %s", [payments.ids[i] for i in unreached])
    return payments.with_rows_zeroed(unreached)
