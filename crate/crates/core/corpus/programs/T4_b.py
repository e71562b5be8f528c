def averageAllPositiveIntegers(numbers):
    sum_positive = 0
    count = 0
    for num in numbers:
        if num > 0:
            sum_positive += num
            count += 1
    if count > 0:
        return sum_positive / count
    else:
        return 0
