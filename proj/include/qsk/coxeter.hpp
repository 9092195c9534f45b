#ifndef QSK_COXETER_HPP
#define QSK_COXETER_HPP

// Symmetric-group word machinery: permutations in one-line notation,
// words in the adjacent transpositions s_i, the descending runs
// omega_{j,i} = s_j s_{j-1} ... s_i and their concatenations omega_k,
// and minimal-length coset representatives for S_{n-m} \ S_n.

#include <cstdint>
#include <string>
#include <vector>

namespace qsk::coxeter {

// Permutation of {1..n}, one-line notation: images[x-1] is the image of x.
struct Perm {
  std::vector<int> images;

  int degree() const { return static_cast<int>(images.size()); }
  int apply(int x) const { return images[x - 1]; }
  bool is_identity() const;
  bool operator==(const Perm& o) const { return images == o.images; }
  bool operator<(const Perm& o) const { return images < o.images; }

  static Perm identity(int n);
  static Perm transposition(int n, int i);  // s_i = (i, i+1)
};

// Word in the generators s_i of S_n; letters[j] = i means the letter s_i.
// Words multiply left to right: (w1 w2)(x) = w2(w1(x)).
struct ReducedWord {
  std::vector<int> letters;
  int n = 0;
  bool reduced = false;  // set by check_reduced()

  int length() const { return static_cast<int>(letters.size()); }
};

// a then b: (a*b)(x) = b(a(x))
Perm mult(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);

// Inversion count, which equals the minimal word length.
int perm_length(const Perm& p);

Perm word_to_perm(const ReducedWord& w);

// Sets and returns the reduced flag: a word is reduced iff its evaluation
// has length equal to the letter count.
bool check_reduced(ReducedWord& w);

// omega_{j,i} = s_j s_{j-1} ... s_i for j >= i, the empty word for j < i.
ReducedWord omega_range_word(int n, int j, int i);

// omega_k = omega_{n-m,1} omega_{n-m+1,1} ... omega_{n-2,1} omega_{n-1,n-k+1},
// all blocks with second index 1 except the last.  For k = 1 the last block
// is empty, so omega_1 = omega_{n-m,1} ... omega_{n-2,1}.
ReducedWord omega_word(int n, int m, int k);

// The unique minimal-length element of the coset S_{n-m} p, where S_{n-m}
// permutes the points 1..n-m.
Perm coset_min_rep(const Perm& p, int n, int m);

// True iff both words evaluate to the same permutation.
bool braid_equal(const ReducedWord& w1, const ReducedWord& w2);

// True iff w1's letters occur, in order but not necessarily contiguously,
// inside w2.
bool is_scattered_subword(const ReducedWord& w1, const ReducedWord& w2);

// All n! permutations of {1..n}, lexicographic.
std::vector<Perm> all_perms(int n);

std::string word_to_string(const ReducedWord& w);
ReducedWord word_from_string(const std::string& s, int n);

}  // namespace qsk::coxeter

#endif
