def averageAllPositiveIntegers(numbers):
    total = 0
    count = 0
    index = 0
    while index < len(numbers):
        if numbers[index] > 0:
            total += numbers[index]
            count += 1
        index += 1
    if count == 0:
        return 0
    return total / count
