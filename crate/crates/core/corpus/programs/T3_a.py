def repeatCharacters(s, n):
    result = ''
    for char in s:
        for _ in range(n):
            result += char
    return result
