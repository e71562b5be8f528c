def repeatCharacters(s, n):
    repeated = ""
    for c in s:
        repeated = repeated + c * n
    return repeated
