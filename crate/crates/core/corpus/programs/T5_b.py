def longestConsecutive(values):
    if len(values) == 0:
        return 0
    start = 0
    current_start = 0
    max_len = 1
    current_len = 1
    for i in range(1, len(values)):
        if values[i] == values[i - 1] + 1:
            current_len += 1
        else:
            current_start = i
            current_len = 1
        if current_len > max_len:
            max_len = current_len
            start = current_start
    return start
