def longestConsecutive(values):
    position = 0
    longest = 0
    for i in range(len(values)):
        length = 1
        for j in range(i + 1, len(values)):
            if values[j] != values[j - 1] + 1:
                break
            length += 1
        if length > longest:
            longest = length
            position = i
    return position
