#pragma once

#include <string>
#include <vector>

namespace steerbench {

enum class VocabField { speed, heading, direction, modifier, style, marker };

struct VocabEntry {
  std::string stem;
  VocabField field;
  std::string value;
};

// Stem table driving the meta-action parser. A token matches an entry when it
// starts with the entry's stem; the longest matching stem wins. The builtin
// table mirrors data/meta_vocabulary.tsv byte for byte.
class Vocabulary {
 public:
  static const Vocabulary& builtin();
  static const char* builtin_tsv();
  static Vocabulary from_tsv(const std::string& tsv);  // throws ParseError
  static Vocabulary from_file(const std::string& path);

  const VocabEntry* match(const std::string& token) const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<VocabEntry>& entries() const { return entries_; }

 private:
  std::vector<VocabEntry> entries_;
};

}  // namespace steerbench
