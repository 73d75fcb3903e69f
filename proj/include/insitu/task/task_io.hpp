#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "insitu/core/io.hpp"
#include "insitu/task/task.hpp"

namespace insitu::task {

inline constexpr const char* kTasksSchema = "insitu.tasks";
inline constexpr int kTasksSchemaVersion = 1;

void to_json(json& j, const AttributeValue& v);
void from_json(const json& j, AttributeValue& v);
void to_json(json& j, const TaskGraph& g);
void from_json(const json& j, TaskGraph& g);
void to_json(json& j, const Task& t);
void from_json(const json& j, Task& t);
void to_json(json& j, const TaskInstance& inst);
void from_json(const json& j, TaskInstance& inst);

struct TaskFile {
    std::vector<TaskInstance> instances;
    std::vector<Task> templates;
};

/// Header line, then one compact JSON object per line: instances first
/// ("kind": "instance"), then templates ("kind": "template").
std::string tasks_to_jsonl(const std::vector<TaskInstance>& instances, const std::vector<Task>& templates = {});
TaskFile tasks_from_jsonl(const std::string& text);

void write_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& instances,
                 const std::vector<Task>& templates = {});
/// Throws Errc::schema_version on a missing or foreign header, Errc::io on
/// unreadable files and Errc::precondition on malformed lines.
TaskFile read_tasks(const std::filesystem::path& path);

} // namespace insitu::task
