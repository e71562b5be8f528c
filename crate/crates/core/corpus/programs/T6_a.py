def removeAdjacentDuplicates(grid):
    for i in range(len(grid) - 1, 0, -1):
        if grid[i] == grid[i - 1]:
            grid[i] = [0] * len(grid[i])
    return grid
