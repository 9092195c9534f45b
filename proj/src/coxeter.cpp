#include "qsk/coxeter.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qsk::coxeter {

bool Perm::is_identity() const {
  for (int x = 1; x <= degree(); ++x)
    if (apply(x) != x) return false;
  return true;
}

Perm Perm::identity(int n) {
  Perm p;
  p.images.resize(n);
  std::iota(p.images.begin(), p.images.end(), 1);
  return p;
}

Perm Perm::transposition(int n, int i) {
  if (i < 1 || i >= n) throw std::invalid_argument("transposition index out of range");
  Perm p = identity(n);
  std::swap(p.images[i - 1], p.images[i]);
  return p;
}

Perm mult(const Perm& a, const Perm& b) {
  if (a.degree() != b.degree()) throw std::invalid_argument("degree mismatch");
  Perm r;
  r.images.resize(a.degree());
  for (int x = 1; x <= a.degree(); ++x) r.images[x - 1] = b.apply(a.apply(x));
  return r;
}

Perm inverse(const Perm& p) {
  Perm r;
  r.images.resize(p.degree());
  for (int x = 1; x <= p.degree(); ++x) r.images[p.apply(x) - 1] = x;
  return r;
}

int perm_length(const Perm& p) {
  int n = p.degree();
  int inv = 0;
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      if (p.apply(a) > p.apply(b)) ++inv;
  return inv;
}

Perm word_to_perm(const ReducedWord& w) {
  Perm p = Perm::identity(w.n);
  for (int letter : w.letters) {
    if (letter < 1 || letter >= w.n) throw std::out_of_range("word letter out of range");
    p = mult(p, Perm::transposition(w.n, letter));
  }
  return p;
}

bool check_reduced(ReducedWord& w) {
  w.reduced = perm_length(word_to_perm(w)) == w.length();
  return w.reduced;
}

ReducedWord omega_range_word(int n, int j, int i) {
  ReducedWord w;
  w.n = n;
  if (j >= n || i < 1) {
    if (j >= i) throw std::invalid_argument("omega_range_word index out of range");
  }
  for (int l = j; l >= i; --l) w.letters.push_back(l);
  return w;
}

ReducedWord omega_word(int n, int m, int k) {
  if (n < 2 || m < 1 || m > n - 1 || k < 1 || k > n)
    throw std::invalid_argument("omega_word parameter out of range");
  ReducedWord w;
  w.n = n;
  for (int j = n - m; j <= n - 2; ++j)
    for (int l = j; l >= 1; --l) w.letters.push_back(l);
  // last block: s_{n-1} ... s_{n-k+1}, empty when k = 1
  for (int l = n - 1; l >= n - k + 1; --l) w.letters.push_back(l);
  check_reduced(w);
  return w;
}

Perm coset_min_rep(const Perm& p, int n, int m) {
  if (p.degree() != n) throw std::invalid_argument("degree mismatch");
  if (m < 1 || m > n - 1) throw std::invalid_argument("m out of range");
  // Enumerate the subgroup S_{n-m} on points 1..n-m and take the
  // minimal-length element of {sigma * p}.
  std::vector<int> sub(n - m);
  std::iota(sub.begin(), sub.end(), 1);
  Perm best = p;
  int best_len = perm_length(p);
  std::sort(sub.begin(), sub.end());
  do {
    Perm sigma = Perm::identity(n);
    for (int x = 1; x <= n - m; ++x) sigma.images[x - 1] = sub[x - 1];
    Perm cand = mult(sigma, p);
    int len = perm_length(cand);
    if (len < best_len) {
      best = cand;
      best_len = len;
    }
  } while (std::next_permutation(sub.begin(), sub.end()));
  return best;
}

bool braid_equal(const ReducedWord& w1, const ReducedWord& w2) {
  if (w1.n != w2.n) throw std::invalid_argument("degree mismatch");
  return word_to_perm(w1) == word_to_perm(w2);
}

bool is_scattered_subword(const ReducedWord& w1, const ReducedWord& w2) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < w2.letters.size() && i < w1.letters.size(); ++j)
    if (w2.letters[j] == w1.letters[i]) ++i;
  return i == w1.letters.size();
}

std::vector<Perm> all_perms(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  std::vector<Perm> out;
  do {
    Perm p;
    p.images = v;
    out.push_back(p);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::string word_to_string(const ReducedWord& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) os << ',';
    os << w.letters[i];
  }
  return os.str();
}

ReducedWord word_from_string(const std::string& s, int n) {
  ReducedWord w;
  w.n = n;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    w.letters.push_back(std::stoi(tok));
  }
  return w;
}

}  // namespace qsk::coxeter
