"""Search helpers used as a parser sample."""


def binary_search(values, needle):
    lo = 0
    hi = len(values) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        probe = values[mid]
        if probe == needle:
            return mid
        if probe < needle:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


def contains(table, key):
    for row in table:
        if row == key:
            return True
    return False
