#include "hindsight/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "hindsight/error.hpp"

namespace hindsight {

VenueConfig VenueConfig::defaults() {
  VenueConfig cfg;
  cfg.top_venues = {"ICLR", "NeurIPS", "ICML", "ACL", "EMNLP", "CVPR", "AAAI"};
  const std::pair<const char*, const char*> aliases[] = {
      {"iclr", "ICLR"},
      {"international conference on learning representations", "ICLR"},
      {"neurips", "NeurIPS"},
      {"nips", "NeurIPS"},
      {"neural information processing systems", "NeurIPS"},
      {"advances in neural information processing systems", "NeurIPS"},
      {"conference on neural information processing systems", "NeurIPS"},
      {"icml", "ICML"},
      {"international conference on machine learning", "ICML"},
      {"acl", "ACL"},
      {"meeting of association for computational linguistics", "ACL"},
      {"association for computational linguistics", "ACL"},
      {"emnlp", "EMNLP"},
      {"empirical methods in natural language processing", "EMNLP"},
      {"conference on empirical methods in natural language processing", "EMNLP"},
      {"cvpr", "CVPR"},
      {"computer vision and pattern recognition", "CVPR"},
      {"conference on computer vision and pattern recognition", "CVPR"},
      {"aaai", "AAAI"},
      {"aaai conference on artificial intelligence", "AAAI"},
  };
  for (auto [alias, canonical] : aliases) cfg.aliases.emplace(alias, canonical);
  return cfg;
}

void VenueConfig::validate() const {
  if (!(weight_citations >= 0.0) || !(weight_venue >= 0.0)) {
    throw ConfigError("impact weights must be non-negative");
  }
  if (std::abs(weight_citations + weight_venue - 1.0) > 1e-12) {
    throw ConfigError("impact weights must sum to 1");
  }
}

namespace {

bool is_filler(const std::string& token) {
  static const std::set<std::string> filler = {"proceedings", "proc", "the", "of", "in", "annual", "ieee", "cvf", "acm"};
  if (filler.count(token)) return true;
  if (std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) return true;
  // ordinals such as "37th" or "1st"
  if (token.size() > 2 && std::isdigit(static_cast<unsigned char>(token.front()))) {
    const auto suffix = token.substr(token.size() - 2);
    const auto digits = token.substr(0, token.size() - 2);
    if ((suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") &&
        std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> venue_tokens(std::string_view venue) {
  std::string cleaned;
  cleaned.reserve(venue.size());
  for (unsigned char c : venue) {
    if (c < 0x80 && (std::ispunct(c) || std::isspace(c))) {
      cleaned.push_back(' ');
    } else {
      cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
  }
  std::istringstream in(cleaned);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) {
    if (!is_filler(tok)) tokens.push_back(std::move(tok));
  }
  return tokens;
}

}  // namespace

std::string normalize_venue(std::string_view venue) {
  std::string out;
  for (const auto& tok : venue_tokens(venue)) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::vector<double> normalize_citations(const std::vector<Paper>& pool) {
  if (pool.empty()) throw ScoringError("cannot normalize citations of an empty pool");
  auto [lo, hi] = std::minmax_element(pool.begin(), pool.end(), [](const Paper& a, const Paper& b) {
    return a.citation_count < b.citation_count;
  });
  const auto min_c = lo->citation_count;
  const auto max_c = hi->citation_count;
  std::vector<double> out(pool.size(), 0.0);
  if (max_c == min_c) return out;
  const double span = static_cast<double>(max_c - min_c);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out[i] = static_cast<double>(pool[i].citation_count - min_c) / span;
  }
  return out;
}

int venue_indicator(const Paper& paper, const VenueConfig& cfg) {
  const auto tokens = venue_tokens(paper.venue);
  if (tokens.empty()) return 0;
  // Workshop and findings tracks are not the main venue.
  for (const auto& tok : tokens) {
    if (tok == "workshop" || tok == "workshops" || tok == "findings") return 0;
  }
  // Alias keys go through the same normalization as the venue string.
  auto resolves = [&](const std::string& key) {
    for (const auto& [alias, canonical] : cfg.aliases) {
      if (normalize_venue(alias) == key) return cfg.top_venues.count(canonical) > 0;
    }
    for (const auto& top : cfg.top_venues) {
      if (normalize_venue(top) == key) return true;
    }
    return false;
  };
  std::string joined;
  for (const auto& tok : tokens) joined += (joined.empty() ? "" : " ") + tok;
  if (resolves(joined)) return 1;
  // Acronym anywhere in the string, e.g. "... Recognition (CVPR)".
  for (const auto& tok : tokens) {
    if (resolves(tok)) return 1;
  }
  return 0;
}

double impact_score(double c_hat, int v, const VenueConfig& cfg) {
  if (!(c_hat >= 0.0 && c_hat <= 1.0)) {
    throw ScoringError("normalized citation count " + std::to_string(c_hat) + " outside [0, 1]");
  }
  if (v != 0 && v != 1) throw ScoringError("venue indicator must be 0 or 1");
  return cfg.weight_citations * c_hat + cfg.weight_venue * v;
}

ImpactTable ImpactTable::build(const std::vector<Paper>& pool, const VenueConfig& cfg) {
  cfg.validate();
  const auto c_hat = normalize_citations(pool);
  ImpactTable table;
  table.entries_.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const int v = venue_indicator(pool[i], cfg);
    table.entries_[pool[i].paper_id] = {c_hat[i], v, impact_score(c_hat[i], v, cfg)};
  }
  return table;
}

void ImpactTable::insert(const std::string& paper_id, ImpactEntry entry) { entries_[paper_id] = entry; }

const ImpactEntry* ImpactTable::find(const std::string& paper_id) const {
  auto it = entries_.find(paper_id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, ImpactEntry>> ImpactTable::sorted() const {
  std::vector<std::pair<std::string, ImpactEntry>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

HindsightScore hindsight_score(const MatchSet& matches, const ImpactTable& table) {
  HindsightScore out{matches.idea_id, 0.0, std::nullopt, matches.matches.size()};
  for (const auto& m : matches.matches) {
    const auto* entry = table.find(m.paper_id);
    if (!entry) throw ScoringError("matched paper " + m.paper_id + " is missing from the impact table");
    if (!out.best_paper_id || entry->h > out.score ||
        (entry->h == out.score && m.paper_id < *out.best_paper_id)) {
      out.score = entry->h;
      out.best_paper_id = m.paper_id;
    }
  }
  return out;
}

}  // namespace hindsight
