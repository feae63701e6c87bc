#pragma once

// Direct recomputation of the word metrics from raw posts, sharing no code
// with the library. Texts must be space-separated lowercase words.

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace brute {

struct Post {
  std::string user;
  std::size_t location;
  std::string text;
};

class Oracle {
 public:
  Oracle(const std::vector<Post>& posts, std::size_t n) : n_(n), tokens_(n, 0.0), users_(n, 0.0) {
    std::map<std::string, std::size_t> home;
    for (const auto& p : posts) {
      auto it = home.find(p.user);
      if (it == home.end()) {
        home[p.user] = p.location;
        users_[p.location] += 1;
      } else if (it->second != p.location) {
        continue;
      }
      std::istringstream words(p.text);
      std::string w;
      while (words >> w) {
        auto& c = counts_[w];
        auto& u = user_sets_[w];
        if (c.empty()) {
          c.assign(n, 0.0);
          u.assign(n, {});
        }
        c[p.location] += 1;
        u[p.location].insert(p.user);
        tokens_[p.location] += 1;
      }
    }
    for (const auto& [w, c] : counts_) {
      double occ = 0;
      for (double x : c) occ += x;
      max_occ_ = std::max(max_occ_, occ);
      max_users_ = std::max(max_users_, users_of(w));
    }
    for (double t : tokens_) total_tokens_ += t;
    for (double u : users_) total_users_ += u;
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    for (const auto& [w, _] : counts_) out.push_back(w);
    return out;
  }

  double occurrences(const std::string& w) const {
    double s = 0;
    for (double x : counts_.at(w)) s += x;
    return s;
  }
  double users_of(const std::string& w) const {
    double s = 0;
    for (const auto& set : user_sets_.at(w)) s += static_cast<double>(set.size());
    return s;
  }
  std::vector<double> user_counts(const std::string& w) const {
    std::vector<double> out;
    for (const auto& set : user_sets_.at(w)) out.push_back(static_cast<double>(set.size()));
    return out;
  }

  static double entropy(const std::vector<double>& counts) {
    double total = 0;
    for (double c : counts) total += c;
    double h = 0;
    for (double c : counts) {
      if (c > 0) h -= (c / total) * std::log(c / total);
    }
    return h;
  }

  double h_words(const std::string& w) const { return entropy(counts_.at(w)); }
  double h_users(const std::string& w) const { return entropy(user_counts(w)); }
  double ltf_ig(const std::string& w) const {
    return std::log(occurrences(w)) / std::log(max_occ_) * (std::log(double(n_)) - h_words(w));
  }
  double luf_ig(const std::string& w) const {
    return std::log(users_of(w)) / std::log(max_users_) * (std::log(double(n_)) - h_users(w));
  }

  // Information gain ratio from the 2 x N contingency table of (word
  // indicator, location) over tokens or over users.
  double igr(const std::string& w, bool by_users) const {
    std::vector<double> with = by_users ? user_counts(w) : counts_.at(w);
    const std::vector<double>& size = by_users ? users_ : tokens_;
    std::vector<double> without(n_);
    double a = 0, b = 0;
    for (std::size_t l = 0; l < n_; ++l) {
      without[l] = size[l] - with[l];
      a += with[l];
      b += without[l];
    }
    const double total = a + b;
    const double h_class = entropy(size);
    double h_cond = 0;
    if (a > 0) h_cond += a / total * entropy(with);
    if (b > 0) h_cond += b / total * entropy(without);
    const double pa = a / total;
    const double pb = b / total;
    const double iv = -pa * std::log(pa) - pb * std::log(pb);
    return (h_class - h_cond) / iv;
  }

  double total_tokens() const { return total_tokens_; }
  double total_users() const { return total_users_; }

 private:
  std::size_t n_;
  std::map<std::string, std::vector<double>> counts_;
  std::map<std::string, std::vector<std::set<std::string>>> user_sets_;
  std::vector<double> tokens_;
  std::vector<double> users_;
  double max_occ_ = 0;
  double max_users_ = 0;
  double total_tokens_ = 0;
  double total_users_ = 0;
};

}  // namespace brute
