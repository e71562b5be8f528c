def longestWord(s):
    words = s.split(" ")
    return max(words, key=len)
