class RateTree:
    """
    Binary partial-sum tree over a fixed list of transition rates.

    Internal nodes hold the exact sum of their two children (recomputed,
    never incremented), so the root does not drift over long runs.
    Sampling and updates are O(log m).
    """

    def __init__(self, rates):
        rates = list(rates)
        size = 1
        while size < max(len(rates), 1):
            size *= 2
        self._size = size
        self._count = len(rates)
        self._tree = [0.0] * (2 * size)
        self._tree[size:size + len(rates)] = [float(r) for r in rates]
        for node in range(size - 1, 0, -1):
            self._tree[node] = self._tree[2 * node] + self._tree[2 * node + 1]

    def __len__(self):
        return self._count

    @property
    def total(self) -> float:
        return self._tree[1]

    def rate(self, i: int) -> float:
        return self._tree[self._size + i]

    def update(self, i: int, rate: float) -> None:
        node = self._size + i
        self._tree[node] = float(rate)
        node //= 2
        while node:
            self._tree[node] = self._tree[2 * node] + self._tree[2 * node + 1]
            node //= 2

    def find(self, u: float) -> int:
        """Index i with prefix(i) <= u < prefix(i + 1), for 0 <= u < total."""
        tree = self._tree
        node = 1
        while node < self._size:
            left = tree[2 * node]
            if u < left:
                node = 2 * node
            else:
                u -= left
                node = 2 * node + 1
        i = node - self._size
        if i >= self._count or tree[node] <= 0.0:
            # u fell on a rounding edge; take the nearest positive leaf
            return self._nearest_positive(min(i, self._count - 1))
        return i

    def _nearest_positive(self, i: int) -> int:
        for j in list(range(i, -1, -1)) + list(range(i + 1, self._count)):
            if self.rate(j) > 0.0:
                return j
        raise ValueError("No transition has positive rate.")
