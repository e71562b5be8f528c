def repeatCharacters(s, n):
    return "".join([ch * n for ch in s])
