#include <dknn/cli.hpp>

#include <curl/curl.h>

namespace
{

std::size_t append(char* data, std::size_t size, std::size_t count, void* user)
{
    static_cast<std::string*>(user)->append(data, size * count);
    return size * count;
}

std::string curl_download(const std::string& url)
{
    CURL* h = curl_easy_init();
    if (!h)
        throw dknn::ComputationError("download: curl initialisation failed");
    std::string body;
    curl_easy_setopt(h, CURLOPT_URL, url.c_str());
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h, CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, append);
    curl_easy_setopt(h, CURLOPT_WRITEDATA, &body);
    const CURLcode rc = curl_easy_perform(h);
    curl_easy_cleanup(h);
    if (rc != CURLE_OK)
        throw dknn::ValidationError("download of " + url + " failed: " + curl_easy_strerror(rc) +
                                    "; fetch the file manually and use fetch-data --offline --from");
    return body;
}

} // namespace

int main(int argc, char** argv)
{
    curl_global_init(CURL_GLOBAL_DEFAULT);
    const std::vector<std::string> args(argv + 1, argv + argc);
    const int code = dknn::cli::run(args, std::cout, std::cerr, curl_download);
    curl_global_cleanup();
    return code;
}
