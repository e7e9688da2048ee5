#include "haiproto/dsl.hpp"

namespace haiproto::dsl {

namespace {

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string print_arg(const Arg& arg) {
    if (arg.type.is_group()) return arg.type.to_string();
    return arg.var.value_or("?") + ": " + arg.type.to_string();
}

struct DeclPrinter {
    std::string operator()(const RoleDecl& d) const { return "role " + d.role.name + ";"; }

    std::string operator()(const ActionDef& d) const {
        std::string out = "action " + d.name + "(" + join(d.params) + ") := ";
        out += to_string(d.primitive.kind);
        out += "(" + print_arg(d.primitive.head);
        for (const auto& r : d.primitive.refs) out += ", " + print_arg(r);
        out += ")";
        if (!d.operations.empty()) {
            out += " <- ";
            for (std::size_t i = 0; i < d.operations.size(); ++i) {
                if (i) out += ", ";
                out += std::string(to_string(d.operations[i].kind)) + "(" + join(d.operations[i].args) + ")";
            }
        }
        if (!d.doc.empty()) out += "\n    doc " + quote(d.doc);
        return out + ";";
    }

    std::string operator()(const Message& m) const {
        std::string out = "message " + m.name + " := " + m.sender.name + " -> " + m.receiver.name + " : ";
        out += m.action + "(" + join(m.args) + ")";
        if (!m.modifiers.empty()) {
            std::vector<const Modifier*> sorted;
            for (const auto& mod : m.modifiers) sorted.push_back(&mod);
            std::stable_sort(sorted.begin(), sorted.end(),
                             [](const Modifier* a, const Modifier* b) { return a->key < b->key; });
            out += " [";
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (i) out += "; ";
                const Modifier& mod = *sorted[i];
                out += mod.annotates_variable ? mod.key + ":" + mod.value : mod.key + "=" + quote(mod.value);
            }
            out += "]";
        }
        return out + ";";
    }

    std::string operator()(const Pattern& p) const {
        std::string out = "pattern " + p.name + " := [" + join(p.messages) + "]";
        if (!p.tags.empty()) {
            out += " @";
            bool first = true;
            for (Tag t : p.tags) {
                if (!first) out += ", ";
                out += to_string(t);
                first = false;
            }
        }
        if (!p.notes.empty()) out += "\n    note " + quote(p.notes);
        return out + ";";
    }

    std::string operator()(const Scenario& s) const {
        return "scenario " + s.name + " := [" + join(s.patterns) + "];";
    }
};

void print_comments(const std::vector<CommentLine>& lines, bool& first, std::string& out) {
    for (const auto& c : lines) {
        if (c.blank_before && !first) out += "\n";
        out += "//" + c.text + "\n";
        first = false;
    }
}

}  // namespace

std::string print(const DeclNode& node) {
    return std::visit(DeclPrinter{}, node);
}

std::string print(const SourceFile& file) {
    std::string out;
    bool first = true;
    for (const auto& decl : file.declarations) {
        print_comments(decl.leading, first, out);
        if (decl.blank_before && !first) out += "\n";
        out += print(decl.node);
        if (decl.trailing) out += " //" + *decl.trailing;
        out += "\n";
        first = false;
    }
    print_comments(file.trailing, first, out);
    return out;
}

bool structurally_equal(const SourceFile& a, const SourceFile& b) {
    if (a.declarations.size() != b.declarations.size() || a.trailing != b.trailing) return false;
    for (std::size_t i = 0; i < a.declarations.size(); ++i) {
        const Decl& x = a.declarations[i];
        const Decl& y = b.declarations[i];
        if (x.node != y.node || x.leading != y.leading || x.trailing != y.trailing ||
            x.blank_before != y.blank_before)
            return false;
    }
    return true;
}

}  // namespace haiproto::dsl
