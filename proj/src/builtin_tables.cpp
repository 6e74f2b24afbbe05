#include <string_view>

#include "semikex/semiring.hpp"

namespace semikex {

namespace {

// Same content as fixtures/maze20.tbl; a unit test keeps them in sync.
constexpr std::string_view kMaze20 = R"(
# 20-element congruence-simple semiring
semiring 20
elements 0 a b c d e f g h i j k l m n o p q r 1
add
0 a b c d e f g h i j k l m n o p q r 1
a a b c d e f g h i j k l m n o p q r 1
b b b c e e f g h i k k l m n o p q r 1
c c c c f f f h h i l l l 1 n p p q r 1
d d e f d e f g h i j k l m n o p q r 1
e e e f e e f g h i k k l m n o p q r 1
f f f f f f f h h i l l l 1 n p p q r 1
g g g h g g h g h i m m 1 m n o p q r 1
h h h h h h h h h i 1 1 1 1 n p p q r 1
i i i i i i i i i i n n n n n q q q r n
j j k l j k l m 1 n j k l m n o p q r 1
k k k l k k l m 1 n k k l m n o p q r 1
l l l l l l l 1 1 n l l l 1 n p p q r 1
m m m 1 m m 1 m 1 n m m 1 m n o p q r 1
n n n n n n n n n n n n n n n q q q r n
o o o p o o p o p q o o p o q o p q r p
p p p p p p p p p q p p p p q p p q r p
q q q q q q q q q q q q q q q q q q r q
r r r r r r r r r r r r r r r r r r r r
1 1 1 1 1 1 1 1 1 n 1 1 1 1 n p p q r 1
mul
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 a a a a a b b b c a
0 0 0 0 a a a b b c a a a b c b b c c b
0 a b c a b c b c c a b c b c b c c c c
0 0 0 0 0 0 0 0 0 0 d d d d d g g g i d
0 0 0 0 a a a b b c d d d e f g g h i e
0 a b c a b c b c c d e f e f g h h i f
0 0 0 0 d d d g g i d d d g i g g i i g
0 a b c d e f g h i d e f g i g h i i h
0 d g i d g i g i i d g i g i g i i i i
0 0 0 0 0 0 0 0 0 0 j j j j j o o o r j
0 0 0 0 a a a b b c j j j k l o o p r k
0 a b c a b c b c c j k l k l o p p r l
0 0 0 0 d d d g g i j j j m n o o q r m
0 d g i d g i g i i j m n m n o q q r n
0 0 0 0 j j j o o r j j j o r o o r r o
0 a b c j k l o p r j k l o r o p r r p
0 d g i j m n o q r j m n o r o q r r q
0 j o r j o r o r r j o r o r o r r r r
0 a b c d e f g h i j k l m n o p q r 1
)";

constexpr std::string_view kBoolean = R"(
semiring 2
elements 0 1
add
0 1
1 1
mul
0 0
0 1
)";

}  // namespace

std::string_view maze20_text() { return kMaze20.substr(1); }

TablePtr builtin_maze20() {
  static const TablePtr table = std::make_shared<const SemiringTable>(load_table(kMaze20));
  return table;
}

TablePtr builtin_boolean() {
  static const TablePtr table = std::make_shared<const SemiringTable>(load_table(kBoolean));
  return table;
}

}  // namespace semikex
