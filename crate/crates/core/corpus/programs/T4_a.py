def averageAllPositiveIntegers(numbers):
    positive_numbers = [num for num in numbers if num > 0]
    if len(positive_numbers) > 0:
        return sum(positive_numbers) / len(positive_numbers)
    else:
        return 0
