int Java_Lookup_find(JNIEnv *env, jobject self, jbyteArray key) {
    int table[8];
    int slot = env->GetArrayLength(key);
    slot = 3;
    return table[slot];
}
