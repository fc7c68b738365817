#pragma once

#include <map>
#include <string>
#include <vector>

namespace collegium {

enum class AgentRole { Clerk, Assistant, CaseJudge, Supervisor, Presiding, Meta, Reflector };

const char* role_name(AgentRole role);
AgentRole role_from_name(const std::string& name);

// One template per workflow stage; the meta agent owns three (induction,
// difference analysis, consolidation summarization).
enum class TemplateId {
    Clerk,
    Assistant,
    CaseJudge,
    Supervisor,
    Presiding,
    MetaInduce,
    MetaDiff,
    MetaMerge,
    Reflector,
};

AgentRole template_role(TemplateId id);
const char* template_file_name(TemplateId id);  // e.g. "case_judge.txt"

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    AgentRole role = AgentRole::Clerk;

    bool operator==(const PromptBundle&) const = default;
};

struct PromptTemplate {
    std::string system_text;  // fixed role instruction
    std::string user_text;    // carries the {{PLACEHOLDER}} markers
};

// Role templates with byte-deterministic {{PLACEHOLDER}} substitution.
// Editable overrides live one file per template in a directory, with a
// line containing only "---" separating the system and user sections.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    // Missing files fall back to the builtin template.
    static PromptLibrary from_dir(const std::string& dir);

    PromptBundle assemble(TemplateId id,
                          const std::map<std::string, std::string>& vars) const;

    const PromptTemplate& get(TemplateId id) const;

    // Emits every template as an editable file under `dir`.
    void write_dir(const std::string& dir) const;

private:
    std::map<TemplateId, PromptTemplate> templates_;
};

}  // namespace collegium
