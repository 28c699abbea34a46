void Java_Store_put(JNIEnv *env, jobject self, jbyteArray blob) {
    std::vector<char> incoming = toVector(env, blob);
    std::vector<char> cache;
    if (incoming.size() <= cache.size()) {
        cache = incoming;
    }
}
