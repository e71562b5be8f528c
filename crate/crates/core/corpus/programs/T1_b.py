def sumOfOdds(x, y, z):
    odd_sum = 0
    for num in [x, y, z]:
        if num % 2 == 1:
            odd_sum = odd_sum + num
    print(odd_sum)
