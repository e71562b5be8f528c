def sumOfOdds(x, y, z):
    numbers = [x, y, z]
    odd_numbers = [n for n in numbers if n % 2 != 0]
    print(sum(odd_numbers))
