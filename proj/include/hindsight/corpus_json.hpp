#pragma once

#include "hindsight/corpus.hpp"
#include "hindsight/jsonl.hpp"

namespace hindsight {

Json to_json(const Paper& paper);
Paper paper_from_json(const Json& record);

Json to_json(const Idea& idea);
Idea idea_from_json(const Json& record);

}  // namespace hindsight
