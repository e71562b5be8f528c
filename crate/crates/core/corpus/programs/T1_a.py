def sumOfOdds(x, y, z):
    total = 0
    if x % 2 != 0:
        total += x
    if y % 2 != 0:
        total += y
    if z % 2 != 0:
        total += z
    print(total)
