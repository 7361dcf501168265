"""Pure-Python fallback for the compiled kernels in _kernels.pyx."""


def lcs_length_ids(a, b) -> int:
    """Length of the longest common subsequence of two int-id sequences."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    for i in range(n):
        curr = [0] * (m + 1)
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                curr[j + 1] = prev[j] + 1
            else:
                pj = prev[j + 1]
                cj = curr[j]
                curr[j + 1] = pj if pj >= cj else cj
        prev = curr
    return prev[m]
