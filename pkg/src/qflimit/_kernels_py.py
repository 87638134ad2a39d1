"""Pure numpy/scipy versions of the compiled kernels."""
import numpy as np
import scipy.sparse as sp


def edge_quadratic(X, indptr, indices):
    n = X.shape[1]
    upper = sp.csr_matrix(
        (np.ones(len(indices)), indices, indptr), shape=(n, n)
    )
    # (n, B): column r holds the forward-neighbour sums for replication r
    inner = upper @ X.T
    return np.einsum("ru,ur->r", X, inner)


def codegree_sums(indptr, indices, n):
    adj = sp.csr_matrix(
        (np.ones(len(indices), dtype=np.int64), indices, indptr), shape=(n, n)
    )
    sq = sp.triu(adj @ adj, k=1).tocsr()
    c = sq.data.astype(np.int64)
    pairs = int((c * (c - 1) // 2).sum())
    squares = int((c * c).sum())
    tri = int(sq.multiply(adj).sum())
    return pairs, squares, tri
