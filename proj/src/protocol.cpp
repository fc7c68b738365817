#include "collegium/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "collegium/errors.hpp"

namespace collegium {

namespace {

std::string clip(std::string_view text, size_t limit = 160) {
    if (text.size() <= limit) return std::string(text);
    return std::string(text.substr(0, limit)) + "...";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Last balanced top-level {...} span; single- and double-quoted strings
// shield braces, quotes outside any object are treated as prose.
std::string extract_last_object(std::string_view text) {
    ptrdiff_t best_start = -1;
    ptrdiff_t best_end = -1;
    size_t start = 0;
    int depth = 0;
    char quote = 0;
    bool escape = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quote) {
            if (escape)
                escape = false;
            else if (c == '\\')
                escape = true;
            else if (c == quote)
                quote = 0;
            continue;
        }
        if (depth > 0 && (c == '"' || c == '\'')) {
            quote = c;
            continue;
        }
        if (c == '{') {
            if (depth == 0) start = i;
            ++depth;
        } else if (c == '}') {
            if (depth > 0 && --depth == 0) {
                best_start = static_cast<ptrdiff_t>(start);
                best_end = static_cast<ptrdiff_t>(i) + 1;
            }
        }
    }
    if (best_start < 0)
        throw Error(ErrorKind::Protocol, "no object found in reply: " + clip(text));
    return std::string(text.substr(best_start, best_end - best_start));
}

// Rewrites single-quoted strings as double-quoted JSON strings.
std::string normalize_quotes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    char quote = 0;
    bool escape = false;
    for (const char c : s) {
        if (quote) {
            if (escape) {
                if (c == '\'')
                    out += '\'';
                else {
                    out += '\\';
                    out += c;
                }
                escape = false;
                continue;
            }
            if (c == '\\') {
                escape = true;
                continue;
            }
            if (c == quote) {
                out += '"';
                quote = 0;
                continue;
            }
            if (c == '"' && quote == '\'') {
                out += "\\\"";
                continue;
            }
            out += c;
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            out += '"';
            continue;
        }
        out += c;
    }
    return out;
}

nlohmann::json parse_object(std::string_view span, const char* what) {
    const std::string normalized = normalize_quotes(span);
    nlohmann::json body = nlohmann::json::parse(normalized, nullptr, false);
    if (body.is_discarded() || !body.is_object())
        throw Error(ErrorKind::Protocol,
                    std::string(what) + " reply is not an object: " + clip(span));
    return body;
}

int parse_int_token(std::string_view token, const char* what) {
    token = trim(token);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw Error(ErrorKind::Protocol,
                    std::string(what) + " holds a non-integer: " + clip(token));
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    size_t begin = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(begin, i - begin));
            begin = i + 1;
        }
    }
    return parts;
}

// Strips one leading "<digits>." / "<digits>)" ordinal marker.
std::string_view strip_ordinal(std::string_view s) {
    size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0 || i >= s.size()) return s;
    if (s[i] != '.' && s[i] != ')') return s;
    return trim(s.substr(i + 1));
}

}  // namespace

std::string extract_finish_body(std::string_view text) {
    static constexpr std::string_view kMarker = "Finish[";
    const size_t pos = text.rfind(kMarker);
    if (pos == std::string_view::npos)
        throw Error(ErrorKind::Protocol, "no Finish[...] marker in: " + clip(text));
    const size_t body_begin = pos + kMarker.size();
    int depth = 1;
    bool in_string = false;
    bool escape = false;
    for (size_t i = body_begin; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escape)
                escape = false;
            else if (c == '\\')
                escape = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            if (--depth == 0) return std::string(text.substr(body_begin, i - body_begin));
        }
    }
    throw Error(ErrorKind::Protocol, "unbalanced Finish[...] in: " + clip(text));
}

std::vector<std::string> parse_clerk(std::string_view text) {
    const std::string body = extract_finish_body(text);
    std::vector<std::string> points;
    for (std::string_view part : split(body, ';')) {
        const std::string_view point = strip_ordinal(trim(part));
        if (!point.empty()) points.emplace_back(point);
    }
    return points;
}

std::vector<int> parse_assistant(std::string_view text) {
    const std::string body_storage = extract_finish_body(text);
    std::string_view body = trim(body_storage);
    // Canonical form is Finish[[...]]; tolerate a single-bracket list.
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']')
            throw Error(ErrorKind::Protocol, "unterminated article list: " + clip(body));
        body = trim(body.substr(1, body.size() - 2));
    }
    std::vector<int> articles;
    if (body.empty()) return articles;
    for (std::string_view token : split(body, ',')) {
        const int id = parse_int_token(token, "article list");
        if (std::find(articles.begin(), articles.end(), id) == articles.end())
            articles.push_back(id);
    }
    return articles;
}

Draft parse_judge(std::string_view text) {
    const nlohmann::json body = parse_object(extract_last_object(text), "judge");
    if (!body.contains("predicted_article"))
        throw Error(ErrorKind::MissingKey, "judge reply lacks predicted_article");
    if (!body.contains("explanation"))
        throw Error(ErrorKind::MissingKey, "judge reply lacks explanation");
    if (!body.at("predicted_article").is_number_integer())
        throw Error(ErrorKind::Protocol, "predicted_article is not an integer");
    if (!body.at("explanation").is_string())
        throw Error(ErrorKind::Protocol, "explanation is not a string");
    Draft draft{body.at("predicted_article").get<int>(),
                body.at("explanation").get<std::string>()};
    if (draft.predicted_article <= 0)
        throw Error(ErrorKind::Validation, "predicted_article must be positive");
    return draft;
}

ReviewDecision parse_supervisor(std::string_view text) {
    const nlohmann::json body = parse_object(extract_finish_body(text), "supervisor");
    if (!body.contains("need_rejudge"))
        throw Error(ErrorKind::MissingKey, "supervisor reply lacks need_rejudge");
    if (!body.at("need_rejudge").is_boolean())
        throw Error(ErrorKind::Protocol, "need_rejudge is not a boolean");
    ReviewDecision decision;
    decision.need_rejudge = body.at("need_rejudge").get<bool>();
    if (body.contains("suggestions")) {
        if (!body.at("suggestions").is_string())
            throw Error(ErrorKind::Protocol, "suggestions is not a string");
        decision.suggestions = body.at("suggestions").get<std::string>();
    }
    if (decision.need_rejudge && decision.suggestions.empty())
        throw Error(ErrorKind::Protocol, "rejection carries no suggestions");
    return decision;
}

PresidingOutput parse_presiding(std::string_view text) {
    const nlohmann::json body = parse_object(extract_finish_body(text), "presiding");
    PresidingOutput output;
    output.verdict = verdict_from_json(body);
    if (body.contains("ranked_articles")) {
        if (!body.at("ranked_articles").is_array())
            throw Error(ErrorKind::Protocol, "ranked_articles is not a list");
        for (const auto& a : body.at("ranked_articles")) {
            if (!a.is_number_integer())
                throw Error(ErrorKind::Protocol, "ranked_articles holds a non-integer");
            output.ranked_articles.push_back(a.get<int>());
        }
    }
    return output;
}

MetaAction parse_meta(std::string_view text) {
    const nlohmann::json body = parse_object(extract_finish_body(text), "meta");
    if (!body.contains("action") || !body.at("action").is_string())
        throw Error(ErrorKind::MissingKey, "meta reply lacks a string action");
    const std::string action = body.at("action").get<std::string>();
    MetaAction out;
    if (action == "ADD")
        out.kind = MetaAction::Kind::Add;
    else if (action == "REFINE")
        out.kind = MetaAction::Kind::Refine;
    else if (action == "PRUNE")
        out.kind = MetaAction::Kind::Prune;
    else if (action == "KEEP")
        out.kind = MetaAction::Kind::Keep;
    else
        throw Error(ErrorKind::Protocol, "unknown meta action " + clip(action));
    if (body.contains("text")) {
        if (!body.at("text").is_string())
            throw Error(ErrorKind::Protocol, "meta text is not a string");
        out.text = body.at("text").get<std::string>();
    }
    if ((out.kind == MetaAction::Kind::Add || out.kind == MetaAction::Kind::Refine) &&
        out.text.empty())
        throw Error(ErrorKind::Protocol, "meta " + action + " carries no text");
    return out;
}

std::string format_clerk(const std::vector<std::string>& points) {
    std::string out = "Finish[";
    for (size_t i = 0; i < points.size(); ++i) {
        if (i) out += "; ";
        out += std::to_string(i + 1) + ". " + points[i];
    }
    out += "]";
    return out;
}

std::string format_assistant(const std::vector<int>& articles) {
    std::string out = "Finish[[";
    for (size_t i = 0; i < articles.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(articles[i]);
    }
    out += "]]";
    return out;
}

std::string format_judge(const Draft& draft) {
    return nlohmann::json{{"predicted_article", draft.predicted_article},
                          {"explanation", draft.explanation}}
        .dump();
}

std::string format_supervisor(const ReviewDecision& decision) {
    return "Finish[" +
           nlohmann::json{{"need_rejudge", decision.need_rejudge},
                          {"suggestions", decision.suggestions}}
               .dump() +
           "]";
}

std::string format_presiding(const Verdict& verdict) {
    return "Finish[" + verdict_to_json(verdict).dump() + "]";
}

std::string format_presiding(const PresidingOutput& output) {
    nlohmann::json body = verdict_to_json(output.verdict);
    if (!output.ranked_articles.empty()) body["ranked_articles"] = output.ranked_articles;
    return "Finish[" + body.dump() + "]";
}

std::string format_meta(const MetaAction& action) {
    const char* name = "KEEP";
    switch (action.kind) {
    case MetaAction::Kind::Add: name = "ADD"; break;
    case MetaAction::Kind::Refine: name = "REFINE"; break;
    case MetaAction::Kind::Prune: name = "PRUNE"; break;
    case MetaAction::Kind::Keep: name = "KEEP"; break;
    }
    return "Finish[" + nlohmann::json{{"action", name}, {"text", action.text}}.dump() + "]";
}

nlohmann::json draft_to_json(const Draft& draft) {
    return {{"predicted_article", draft.predicted_article},
            {"explanation", draft.explanation}};
}

nlohmann::json review_to_json(const ReviewDecision& decision) {
    return {{"need_rejudge", decision.need_rejudge},
            {"suggestions", decision.suggestions}};
}

nlohmann::json presiding_to_json(const PresidingOutput& output) {
    return {{"verdict", verdict_to_json(output.verdict)},
            {"ranked_articles", output.ranked_articles}};
}

nlohmann::json meta_to_json(const MetaAction& action) {
    nlohmann::json j;
    switch (action.kind) {
    case MetaAction::Kind::Add: j["action"] = "ADD"; break;
    case MetaAction::Kind::Refine: j["action"] = "REFINE"; break;
    case MetaAction::Kind::Prune: j["action"] = "PRUNE"; break;
    case MetaAction::Kind::Keep: j["action"] = "KEEP"; break;
    }
    j["text"] = action.text;
    return j;
}

}  // namespace collegium
