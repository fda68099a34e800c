#include "treepack/io.hpp"

#include "treepack/error.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <string>

namespace treepack {

void write_family_jsonl(std::ostream& out, const TreeFamily& fam)
{
    nlohmann::ordered_json head;
    head["n"] = fam.n;
    head["delta"] = fam.delta;
    out << head.dump() << '\n';
    for (const auto& t : fam.trees) {
        nlohmann::ordered_json line;
        line["order"] = t.order();
        line["root"] = t.root();
        line["parent"] = t.parents();
        out << line.dump() << '\n';
    }
}

TreeFamily read_family_jsonl(std::istream& in)
{
    TreeFamily fam;
    std::string text;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + "malformed JSON (" + e.what() + ")");
        }
        try {
            if (!have_header) {
                fam.n = j.at("n").get<int>();
                fam.delta = j.at("delta").get<int>();
                have_header = true;
                continue;
            }
            auto parent = j.at("parent").get<std::vector<int>>();
            const int root = j.at("root").get<int>();
            if (j.contains("order") && j["order"].get<int>() != int(parent.size()))
                throw InputError(where + "order disagrees with the parent list");
            fam.trees.emplace_back(std::move(parent), root);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + "missing or mistyped field (" + e.what() + ")");
        } catch (const InputError& e) {
            const std::string msg = e.what();
            throw InputError(msg.rfind("line ", 0) == 0 ? msg : where + msg);
        }
    }
    if (!have_header)
        throw InputError("tree family file has no header line");
    check_family_bounds(fam);
    return fam;
}

} // namespace treepack
