def removeAdjacentDuplicates(grid):
    previous = None
    for row in grid:
        current = row[:]
        if current == previous:
            for k in range(len(row)):
                row[k] = 0
        previous = current
    return grid
