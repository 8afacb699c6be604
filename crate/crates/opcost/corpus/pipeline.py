"""Toy signal pipeline used as a parser sample."""

GAIN = 2.0


def blend(a, b, t):
    return a * (1.0 - t) + b * t


def normalize(frame):
    total = 1e-9
    for v in frame.samples:
        total += v
    frame.scale = 1.0 / total
    if frame.scale:
        return round(total)


def main(samples):
    mixed = blend(samples[0], samples[1], 0.5)
    scaled = mixed * GAIN
    report = normalize(scaled)
    return report
