def longestConsecutive(values):
    best_start = 0
    best_length = 0
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[j] + 1:
            j += 1
        length = j - i + 1
        if length > best_length:
            best_length = length
            best_start = i
        i = j + 1
    return best_start
