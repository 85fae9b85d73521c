"""Brute-force pseudo-pINP search for positive maps of a free-group rose.

Lists every path alpha.beta with legal branches of length <= B and an
illegal turn, keeps those contained in a translate of [f^n] for n <= P, and
reduces to minimal ones. Offsets give where the path sits in its iterate:
a nonzero head (tail) offset means the start (end) point lies inside the
first (last) edge.
"""
import sys
def inv(x): return x.swapcase()
def red(w):
    st=[]
    for c in w:
        if st and st[-1]==inv(c): st.pop()
        else: st.append(c)
    return ''.join(st)
def mk(f):
    img={}
    for g,w in f.items():
        img[g]=w; img[g.upper()]=red(''.join(inv(x) for x in reversed(w)))
    return img
def app(img,w): return red(''.join(img[c] for c in w))
def rev(v): return ''.join(inv(c) for c in reversed(v))
def run(f,B=6,P=4):
    img=mk(f); letters=sorted(img)
    first={c:img[c][0] for c in letters}
    def illegal_turn(x,y):
        seen=set()
        while True:
            if x==y: return True
            if (x,y) in seen: return False
            seen.add((x,y)); x,y=first[x],first[y]
    def legal_paths(start_germ,maxlen):
        out=[]
        def rec(w):
            out.append(w)
            if len(w)==maxlen: return
            for c in letters:
                if c==inv(w[-1]): continue
                if illegal_turn(inv(w[-1]),c): continue
                rec(w+c)
        rec(start_germ); return out
    res=[]
    for x in letters:
        for y in letters:
            if x>=y or not illegal_turn(x,y): continue
            A=legal_paths(x,B); Bs=legal_paths(y,B)
            for a in A:
                alpha=rev(a)
                for b in Bs:
                    w=alpha+b
                    im=w
                    for n in range(1,P+1):
                        im=app(img,im)
                        if w in im: res.append((w,n)); break
    S=set(x for x,_ in res)
    mins=sorted(set((w,n) for w,n in res if not any(v!=w and (v in w or rev(v) in w) for v in S)))
    return mins

def offsets(f, w, n):
    img = mk(f)
    im = w
    for _ in range(n):
        im = app(img, im)
    k = im.find(w)
    return k, len(im) - k - len(w)


MAPS = [
    ('fib', {'s': 'st', 't': 's'}),
    ('fib2', {'s': 'sts', 't': 'st'}),
    ('trib', {'x': 'y', 'y': 'z', 'z': 'xy'}),
    ('interior', {'s': 'sst', 't': 'st'}),
]

if __name__ == '__main__':
    B = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    for name, f in MAPS:
        res = run(f, B=B, P=4)
        print(name, [(w, n) + offsets(f, w, n) for w, n in res])
