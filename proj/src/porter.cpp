#include "cbrowse/porter.hpp"

#include <initializer_list>
#include <span>

namespace cbrowse {

namespace {

// Working state mirrors the reference implementation: b[0..k] is the current
// word, j marks the end of the stem once a suffix has matched.
class PorterStemmer {
 public:
  explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

  std::string run() {
    if (k_ <= 1) return b_;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, static_cast<std::size_t>(k_ + 1));
  }

 private:
  bool cons(int i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  bool double_consonant(int i) const {
    if (i < 1) return false;
    if (b_[i] != b_[i - 1]) return false;
    return cons(i);
  }

  // consonant-vowel-consonant ending at i, where the final consonant is not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (std::string_view(b_).substr(static_cast<std::size_t>(k_ + 1 - len), s.size()) != s) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void replace_if_measure(std::string_view s) {
    if (m() > 0) set_to(s);
  }

  // Plurals and -ed/-ing.
  void step1ab() {
    if (b_[k_] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        --k_;
        char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (m() == 1 && cvc(k_)) {
        set_to("e");
      }
    }
  }

  // Terminal y -> i when there is another vowel in the stem.
  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
  }

  // Double suffixes map to single ones when m() > 0. The first matching
  // suffix ends the step whether or not it is replaced.
  void step2() {
    struct Rule {
      std::string_view from, to;
    };
    static constexpr Rule kA[] = {{"ational", "ate"}, {"tional", "tion"}};
    static constexpr Rule kC[] = {{"enci", "ence"}, {"anci", "ance"}};
    static constexpr Rule kE[] = {{"izer", "ize"}};
    static constexpr Rule kL[] = {{"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
    static constexpr Rule kO[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
    static constexpr Rule kS[] = {{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
    static constexpr Rule kT[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
    static constexpr Rule kG[] = {{"logi", "log"}};
    if (k_ < 1) return;
    std::span<const Rule> rules;
    switch (b_[k_ - 1]) {
      case 'a': rules = kA; break;
      case 'c': rules = kC; break;
      case 'e': rules = kE; break;
      case 'l': rules = kL; break;
      case 'o': rules = kO; break;
      case 's': rules = kS; break;
      case 't': rules = kT; break;
      case 'g': rules = kG; break;
      default: return;
    }
    for (const auto& r : rules) {
      if (ends(r.from)) {
        replace_if_measure(r.to);
        return;
      }
    }
  }

  // -ic-, -full, -ness etc.
  void step3() {
    struct Rule {
      std::string_view from, to;
    };
    static constexpr Rule kE[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
    static constexpr Rule kI[] = {{"iciti", "ic"}};
    static constexpr Rule kL[] = {{"ical", "ic"}, {"ful", ""}};
    static constexpr Rule kS[] = {{"ness", ""}};
    std::span<const Rule> rules;
    switch (b_[k_]) {
      case 'e': rules = kE; break;
      case 'i': rules = kI; break;
      case 'l': rules = kL; break;
      case 's': rules = kS; break;
      default: return;
    }
    for (const auto& r : rules) {
      if (ends(r.from)) {
        replace_if_measure(r.to);
        return;
      }
    }
  }

  // Strip -ant, -ence etc. in context <c>vcvc<v>.
  void step4() {
    if (k_ < 1) return;
    auto any_of = [this](std::initializer_list<std::string_view> suffixes) {
      for (auto s : suffixes) {
        if (ends(s)) return true;
      }
      return false;
    };
    bool matched = false;
    switch (b_[k_ - 1]) {
      case 'a': matched = ends("al"); break;
      case 'c': matched = any_of({"ance", "ence"}); break;
      case 'e': matched = ends("er"); break;
      case 'i': matched = ends("ic"); break;
      case 'l': matched = any_of({"able", "ible"}); break;
      case 'n': matched = any_of({"ant", "ement", "ment", "ent"}); break;
      case 'o':
        if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) {
          matched = true;
        } else {
          matched = ends("ou");
        }
        break;
      case 's': matched = ends("ism"); break;
      case 't': matched = any_of({"ate", "iti"}); break;
      case 'u': matched = ends("ous"); break;
      case 'v': matched = ends("ive"); break;
      case 'z': matched = ends("ize"); break;
      default: return;
    }
    if (matched && m() > 1) k_ = j_;
  }

  // Final -e and -ll.
  void step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
  }

  std::string b_;
  int k_;
  int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) { return PorterStemmer(word).run(); }

}  // namespace cbrowse
