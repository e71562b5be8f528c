def removeAdjacentDuplicates(grid):
    result = [grid[0][:]] if len(grid) > 0 else []
    for r in range(1, len(grid)):
        if grid[r] == grid[r - 1]:
            result.append([0] * len(grid[r]))
        else:
            result.append(grid[r][:])
    return result
