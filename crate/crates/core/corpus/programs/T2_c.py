def longestWord(s):
    words = s.split()
    max_length = 0
    result = ""
    i = 0
    while i < len(words):
        if len(words[i]) > max_length:
            max_length = len(words[i])
            result = words[i]
        i += 1
    return result
