def scale(values, factor):
    out = []
    for v in values:
        out.append(v * factor + 1)
    return out
