"""Numba kernels for the simulation core.

Trees are parent arrays indexed by child vertex (parent[v] < v, root = 1,
entries 0 and 1 unused). Edges are identified by their child vertex.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def vertex_depths(parent):
    n = parent.shape[0] - 1
    depth = np.zeros(n + 1, dtype=np.int64)
    for v in range(2, n + 1):
        depth[v] = depth[parent[v]] + 1
    return depth


@njit(cache=True)
def root_branch(parent):
    """Ancestor among the root's children for every vertex (0 at the root)."""
    n = parent.shape[0] - 1
    anc = np.zeros(n + 1, dtype=np.int64)
    for v in range(2, n + 1):
        p = parent[v]
        anc[v] = v if p == 1 else anc[p]
    return anc


@njit(cache=True)
def path_min(parent, times):
    """Minimum edge time on the root->v path, for every v; +inf at the root.

    This is the first instant v is separated from the root component: the
    path survives until its earliest edge removal.
    """
    n = parent.shape[0] - 1
    gamma = np.empty(n + 1)
    gamma[0] = np.inf
    gamma[1] = np.inf
    for v in range(2, n + 1):
        tv = times[v]
        g = gamma[parent[v]]
        gamma[v] = tv if tv < g else g
    return gamma


@njit(cache=True)
def merge_tree(parent, order_desc):
    """Binary merge tree of components, built by replaying cuts latest-first.

    Each union of two current components creates the internal node whose
    children are their nodes; run backwards this reproduces the splitting
    genealogy of the forward destruction.

    Node ids: leaf for vertex v is v-1; the q-th union creates node n+q;
    the last union (the first cut) creates the root 2n-2.

    Returns (left, right, cut_rank, min_leaf, node_parent, node_depth);
    cut_rank is the 0-based rank of the creating cut in increasing time
    order. Children are ordered so the smaller minimum leaf label is left.
    """
    n = parent.shape[0] - 1
    total = 2 * n - 1
    uf = np.arange(n + 1, dtype=np.int64)
    comp_node = np.empty(n + 1, dtype=np.int64)
    for v in range(1, n + 1):
        comp_node[v] = v - 1
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    cut_rank = np.full(total, -1, dtype=np.int64)
    min_leaf = np.empty(total, dtype=np.int64)
    for v in range(n):
        min_leaf[v] = v + 1
    for q in range(n - 1):
        v = order_desc[q]
        a = parent[v]
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        b = v
        while uf[b] != b:
            uf[b] = uf[uf[b]]
            b = uf[b]
        m = n + q
        na = comp_node[a]
        nb = comp_node[b]
        if min_leaf[na] <= min_leaf[nb]:
            left[m] = na
            right[m] = nb
        else:
            left[m] = nb
            right[m] = na
        min_leaf[m] = min_leaf[left[m]]
        cut_rank[m] = n - 2 - q
        uf[b] = a
        comp_node[a] = m
    node_parent = np.full(total, -1, dtype=np.int64)
    node_depth = np.zeros(total, dtype=np.int64)
    for m in range(total - 1, n - 1, -1):
        node_parent[left[m]] = m
        node_parent[right[m]] = m
    for m in range(total - 2, -1, -1):
        node_depth[m] = node_depth[node_parent[m]] + 1
    return left, right, cut_rank, min_leaf, node_parent, node_depth


@njit(cache=True)
def merge_leaf_depths(parent, order_desc):
    """Leaf depths of the merge tree only: one parent-pointer array instead
    of the full node structure (see merge_tree)."""
    n = parent.shape[0] - 1
    total = 2 * n - 1
    uf = np.arange(n + 1, dtype=np.int64)
    comp_node = np.empty(n + 1, dtype=np.int64)
    for v in range(1, n + 1):
        comp_node[v] = v - 1
    node_parent = np.full(total, -1, dtype=np.int64)
    for q in range(n - 1):
        v = order_desc[q]
        a = parent[v]
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        b = v
        while uf[b] != b:
            uf[b] = uf[uf[b]]
            b = uf[b]
        m = n + q
        node_parent[comp_node[a]] = m
        node_parent[comp_node[b]] = m
        uf[b] = a
        comp_node[a] = m
    node_depth = np.zeros(total, dtype=np.int64)
    for m in range(total - 2, -1, -1):
        node_depth[m] = node_depth[node_parent[m]] + 1
    return node_depth[:n]


@njit(cache=True)
def children_csr(parent):
    """CSR view of the children lists: children of v are childs[off[v]:off[v+1]]."""
    n = parent.shape[0] - 1
    cnt = np.zeros(n + 2, dtype=np.int64)
    for v in range(2, n + 1):
        cnt[parent[v] + 1] += 1
    off = np.cumsum(cnt)
    fill = off.copy()
    childs = np.empty(n - 1, dtype=np.int64)
    for v in range(2, n + 1):
        p = parent[v]
        childs[fill[p]] = v
        fill[p] += 1
    return off, childs


@njit(cache=True)
def euler_intervals(off, childs, n):
    """DFS entry/exit times from the root; u lies in subtree(v) iff
    tin[v] <= tin[u] < tout[v]."""
    tin = np.zeros(n + 1, dtype=np.int64)
    tout = np.zeros(n + 1, dtype=np.int64)
    stack = np.empty(2 * n + 2, dtype=np.int64)
    top = 0
    stack[top] = 1
    top += 1
    timer = 0
    while top > 0:
        top -= 1
        v = stack[top]
        if v > 0:
            tin[v] = timer
            timer += 1
            stack[top] = -v
            top += 1
            for ci in range(off[v + 1] - 1, off[v] - 1, -1):
                stack[top] = childs[ci]
                top += 1
        else:
            tout[-v] = timer
    return tin, tout


@njit(cache=True)
def record_edges_from(off, childs, parent, times, src, mask_out):
    """Mark the edges whose removal happens inside src's current component.

    Edge e is cut while still attached to src iff its time beats every edge
    time on the path from src to e's nearer endpoint, i.e. e is a running
    minimum seen from src. BFS from src propagating the path minimum; sets
    mask_out[child_vertex] = 1 for each such edge. mask_out must be zeroed
    by the caller; its length is n+1.
    """
    n = parent.shape[0] - 1
    mp = np.empty(n + 1)
    visited = np.zeros(n + 1, dtype=np.uint8)
    queue = np.empty(n, dtype=np.int64)
    qh = 0
    qt = 0
    queue[qt] = src
    qt += 1
    visited[src] = 1
    mp[src] = np.inf
    while qh < qt:
        x = queue[qh]
        qh += 1
        mpx = mp[x]
        if x != 1:
            p = parent[x]
            if visited[p] == 0:
                t = times[x]
                if t < mpx:
                    mask_out[x] = 1
                    mp[p] = t
                else:
                    mp[p] = mpx
                visited[p] = 1
                queue[qt] = p
                qt += 1
        for ci in range(off[x], off[x + 1]):
            c = childs[ci]
            if visited[c] == 0:
                t = times[c]
                if t < mpx:
                    mask_out[c] = 1
                    mp[c] = t
                else:
                    mp[c] = mpx
                visited[c] = 1
                queue[qt] = c
                qt += 1


@njit(cache=True)
def spread_steps(cand_edges, masks, tin, tout, target_tin):
    """Replay the multi-target isolation that discards components holding
    at most one target.

    cand_edges: child-vertices of cuts landing in a component with >= 2
    targets, in increasing time order. masks[t, e] says whether cut e lands
    in target t's component. Returns w, with w[k-2] = number of replayed
    steps until the targets first occupy k distinct components (k = 2..j).
    """
    j = masks.shape[0]
    w = np.zeros(j - 1, dtype=np.int64)
    steps = 0
    seps = 0
    for idx in range(cand_edges.shape[0]):
        e = cand_edges[idx]
        steps += 1
        total = 0
        inside = 0
        lo = tin[e]
        hi = tout[e]
        for t in range(j):
            if masks[t, e]:
                total += 1
                if lo <= target_tin[t] < hi:
                    inside += 1
        if 0 < inside < total:
            seps += 1
            w[seps - 1] = steps
            if seps == j - 1:
                break
    return w


@njit(cache=True)
def distances_from(off, childs, parent, src):
    """Graph distances from src to every vertex (BFS over the tree)."""
    n = parent.shape[0] - 1
    dist = np.full(n + 1, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    qh = 0
    qt = 0
    queue[qt] = src
    qt += 1
    dist[src] = 0
    while qh < qt:
        x = queue[qh]
        qh += 1
        dx = dist[x]
        if x != 1:
            p = parent[x]
            if dist[p] < 0:
                dist[p] = dx + 1
                queue[qt] = p
                qt += 1
        for ci in range(off[x], off[x + 1]):
            c = childs[ci]
            if dist[c] < 0:
                dist[c] = dx + 1
                queue[qt] = c
                qt += 1
    return dist


@njit(cache=True)
def bst_parents(keys):
    """Parents of the binary search tree of `keys`, labeled by insertion order."""
    n = keys.shape[0]
    parent = np.zeros(n + 1, dtype=np.int64)
    left = np.zeros(n + 1, dtype=np.int64)
    right = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n):
        k = keys[i]
        node = 1
        while True:
            if k < keys[node - 1]:
                nxt = left[node]
                if nxt == 0:
                    left[node] = i + 1
                    break
            else:
                nxt = right[node]
                if nxt == 0:
                    right[node] = i + 1
                    break
            node = nxt
        parent[i + 1] = node
    return parent


@njit(cache=True)
def bary_parents(n, b, uniforms):
    """Recursive b-ary tree: each vertex offers b child slots, each new
    vertex occupies a uniformly random free slot."""
    parent = np.zeros(n + 1, dtype=np.int64)
    slots = np.empty(b * n, dtype=np.int64)
    cnt = 0
    for s in range(b):
        slots[cnt] = 1
        cnt += 1
    for v in range(2, n + 1):
        pick = int(uniforms[v - 2] * cnt)
        if pick >= cnt:
            pick = cnt - 1
        parent[v] = slots[pick]
        slots[pick] = slots[cnt - 1]
        cnt -= 1
        for s in range(b):
            slots[cnt] = v
            cnt += 1
    return parent


@njit(cache=True)
def scale_free_parents(n, alpha, u_choice, u_pick):
    """Preferential attachment with weight degree + alpha, for alpha >= 0.

    Starts from the edge {1,2}. Degree-proportional picks use a uniform
    entry of the edge-endpoint list; the extra +alpha mass is a uniform
    vertex, mixed in with the exact probability.
    """
    parent = np.zeros(n + 1, dtype=np.int64)
    parent[2] = 1
    ends = np.empty(2 * (n - 1), dtype=np.int64)
    ends[0] = 1
    ends[1] = 2
    cnt = 2
    for v in range(3, n + 1):
        k = v - 2  # current edge count; v-1 vertices with degree sum 2k
        nverts = v - 1
        w_deg = 2.0 * k
        w_tot = w_deg + alpha * nverts
        if u_choice[v - 3] * w_tot < w_deg:
            pick = ends[int(u_pick[v - 3] * cnt)]
        else:
            pick = 1 + int(u_pick[v - 3] * nverts)
            if pick > nverts:
                pick = nverts
        parent[v] = pick
        ends[cnt] = v
        ends[cnt + 1] = pick
        cnt += 2
    return parent


@njit(cache=True)
def prufer_decode(code, n):
    """Edges of the labeled tree with Pruefer sequence `code` on {1..n}."""
    deg = np.ones(n + 1, dtype=np.int64)
    for i in range(code.shape[0]):
        deg[code[i]] += 1
    eu = np.empty(n - 1, dtype=np.int64)
    ev = np.empty(n - 1, dtype=np.int64)
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for i in range(code.shape[0]):
        v = code[i]
        eu[i] = leaf
        ev[i] = v
        deg[v] -= 1
        if deg[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    eu[n - 2] = leaf
    ev[n - 2] = n
    return eu, ev


@njit(cache=True)
def relabel_bfs(eu, ev, n):
    """Root the edge list at vertex 1 and relabel by BFS visit order, so
    parents precede children. Returns a canonical parent array."""
    cnt = np.zeros(n + 2, dtype=np.int64)
    for i in range(n - 1):
        cnt[eu[i] + 1] += 1
        cnt[ev[i] + 1] += 1
    off = np.cumsum(cnt)
    fill = off.copy()
    adj = np.empty(2 * (n - 1), dtype=np.int64)
    for i in range(n - 1):
        adj[fill[eu[i]]] = ev[i]
        fill[eu[i]] += 1
        adj[fill[ev[i]]] = eu[i]
        fill[ev[i]] += 1
    newlab = np.zeros(n + 1, dtype=np.int64)
    parent = np.zeros(n + 1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    qh = 0
    qt = 0
    queue[qt] = 1
    qt += 1
    newlab[1] = 1
    nxt = 2
    while qh < qt:
        x = queue[qh]
        qh += 1
        for ci in range(off[x], off[x + 1]):
            y = adj[ci]
            if newlab[y] == 0 and y != 1:
                newlab[y] = nxt
                parent[nxt] = newlab[x]
                nxt += 1
                queue[qt] = y
                qt += 1
    return parent


@njit(cache=True)
def sf0_profile_batch(n_edges, srcs, zs, uniforms, out):
    """Monte Carlo profile sums for alpha=0 preferential attachment.

    For each replica r builds a tree with n_edges edges, then for each
    source vertex srcs[s] accumulates sum over other vertices of
    z^(distance-1) into out[r, s, zi]. uniforms has shape
    (replicas, n_edges - 1).
    """
    reps = uniforms.shape[0]
    nv = n_edges + 1
    for r in range(reps):
        parent = np.zeros(nv + 1, dtype=np.int64)
        parent[2] = 1
        ends = np.empty(2 * n_edges, dtype=np.int64)
        ends[0] = 1
        ends[1] = 2
        cnt = 2
        for v in range(3, nv + 1):
            pick = ends[int(uniforms[r, v - 3] * cnt)]
            parent[v] = pick
            ends[cnt] = v
            ends[cnt + 1] = pick
            cnt += 2
        off, childs = children_csr(parent)
        for s in range(srcs.shape[0]):
            dist = distances_from(off, childs, parent, srcs[s])
            for zi in range(zs.shape[0]):
                z = zs[zi]
                acc = 0.0
                for v in range(1, nv + 1):
                    d = dist[v]
                    if d > 0:
                        acc += z ** (d - 1)
                out[r, s, zi] = acc
