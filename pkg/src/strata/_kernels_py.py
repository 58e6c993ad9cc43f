"""Pure-Python versions of the integer-table kernels.

Tables are indexed by morphism position: ``table[f][g]`` is the position of
``g∘f`` or -1 when undefined.  ``out_offsets``/``out_items`` list, for each
object position, the morphisms leaving it (CSR layout).
"""

BACKEND = "python"


def assoc_violations(table, out_offsets, out_items, dst):
    rows = table.tolist() if hasattr(table, "tolist") else table
    offs = list(out_offsets)
    items = list(out_items)
    dsts = list(dst)
    found = []
    for f in range(len(dsts)):
        row_f = rows[f]
        b = dsts[f]
        for gi in range(offs[b], offs[b + 1]):
            g = items[gi]
            gf = row_f[g]
            if gf < 0:
                continue
            row_g = rows[g]
            row_gf = rows[gf]
            c = dsts[g]
            for hi in range(offs[c], offs[c + 1]):
                h = items[hi]
                hg = row_g[h]
                if hg < 0:
                    continue
                left = row_gf[h]
                right = row_f[hg]
                if left != right:
                    found.append((f, g, h))
    return found


def functor_violations(src_table, out_offsets, out_items, src_dst, fmor, dst_table):
    rows = src_table.tolist() if hasattr(src_table, "tolist") else src_table
    drows = dst_table.tolist() if hasattr(dst_table, "tolist") else dst_table
    offs = list(out_offsets)
    items = list(out_items)
    fm = list(fmor)
    found = []
    for f in range(len(fm)):
        b = src_dst[f]
        for gi in range(offs[b], offs[b + 1]):
            g = items[gi]
            gf = rows[f][g]
            if gf < 0 or drows[fm[f]][fm[g]] != fm[gf]:
                found.append((f, g))
    return found


def naturality_violations(msrc, mdst, fmor, gmor, comps, dst_table):
    drows = dst_table.tolist() if hasattr(dst_table, "tolist") else dst_table
    found = []
    for f in range(len(msrc)):
        a = msrc[f]
        b = mdst[f]
        upper = drows[comps[a]][gmor[f]]
        lower = drows[fmor[f]][comps[b]]
        if upper < 0 or upper != lower:
            found.append(f)
    return found
